#include <cstdio>

int main() {
  std::puts("hsx: subcommands not wired yet");
  return 1;
}
