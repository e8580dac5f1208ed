#include "actq/commands.hpp"

int main(int argc, char** argv) { return actq::cli::main(argc, argv); }
