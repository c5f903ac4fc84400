#include "nldd/cli.hpp"

int main(int argc, char** argv) { return nldd::cli::main(argc, argv); }
