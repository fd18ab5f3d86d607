#include "nirdehaze/cli.hpp"

int main(int argc, char** argv) { return nirdehaze::cli::main_entry(argc, argv); }
