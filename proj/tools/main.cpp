#include "mea/harness.hpp"

int main(int argc, char** argv) { return mea::cli_main(argc, argv); }
