#pragma once

#include "dsp/bundle.hpp"

#include <string>
#include <string_view>

namespace dsp {

// Parses a bundle-size distribution description:
//   det:m                 point mass at m
//   uniform:a..b          uniform on {a..b}
//   tpois:mean,max        Poisson(mean) conditioned on {1..max}
//   truncated-poisson(mean, max)
//   list:w1,w2,...        explicit weights for sizes 1, 2, ...
// Throws ConfigError on anything else.
BundlePmf parse_pmf_spec(std::string_view spec);

}  // namespace dsp
