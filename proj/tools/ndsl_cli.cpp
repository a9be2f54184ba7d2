#include <iostream>

#include "ndsl/pipeline.hpp"

int main() {
    std::cout << "ndsl stub\n";
    return 0;
}
