#include "mwell/cli.hpp"

int main(int argc, char** argv) { return mwell::cli::run(argc, argv); }
