#include "spct/cli.hpp"

int main(int argc, char** argv)
{
    return spct::run_cli(argc, argv);
}
