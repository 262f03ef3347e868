#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "mchain/log.hpp"

int main(int argc, char** argv) {
  mchain::log::set_level(mchain::log::Level::quiet);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
