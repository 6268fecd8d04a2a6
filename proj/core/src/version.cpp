#include "mixtype/version.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>

namespace mixtype {

std::string version() { return MIXTYPE_VERSION; }

std::vector<std::pair<std::string, std::string>> dependency_versions() {
  const auto num = [](int a, int b, int c) {
    return std::to_string(a) + "." + std::to_string(b) + "." + std::to_string(c);
  };
  return {
      {"eigen", num(EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"boost", num(BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000, BOOST_VERSION % 100)},
      {"fftw", fftw_version},
      {"compiler", __VERSION__},
  };
}

}  // namespace mixtype
