#include "treeviz/cli.hpp"

int main(int argc, char** argv) { return treeviz::run(argc, argv); }
