#include "cli.hpp"

int main(int argc, char** argv) { return moran::cli::main_entry(argc, argv); }
