#include "coopaloha/cli.hpp"

int main(int argc, char** argv) { return coopaloha::cli_main(argc, argv); }
