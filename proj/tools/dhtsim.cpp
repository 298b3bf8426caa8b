#include <string>
#include <vector>

#include "dht/cli.hpp"

int main(int argc, char** argv) {
    return dht::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
