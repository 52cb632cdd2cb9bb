#include <cstdio>

int main() {
    std::puts("acceptance suite placeholder");
    return 0;
}
