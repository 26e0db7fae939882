#include "spinshot/cli.hpp"

int main(int argc, char** argv) { return spinshot::dispatch(argc, argv); }
