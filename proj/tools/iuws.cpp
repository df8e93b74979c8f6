#include "iuws/cli.hpp"

int main(int argc, char** argv) { return iuws::run(argc, argv); }
