// Inverse folding CLI; subcommands are wired up in main() below.
#include <iostream>

int main() {
    std::cout << "pkinv\n";
    return 0;
}
