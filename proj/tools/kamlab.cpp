#include "kamlab/cli.hpp"

int main(int argc, char** argv) { return kamlab::cli::main_entry(argc, argv); }
