#include "pcorder/properties.hpp"

namespace pcorder {

namespace {

constexpr std::array<std::string_view, kPropertyCount> kKeys = {
    "pos_corr", "neg_corr",       "pos_var",  "neg_var",      "pos_skew", "neg_skew",
    "outliers", "density_change", "clear_grouping", "split_up", "neighborhood", "fan",
};

}  // namespace

std::string_view property_key(PropertyId p) { return kKeys[static_cast<std::size_t>(p)]; }

std::optional<PropertyId> property_from_key(std::string_view key) {
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    if (kKeys[i] == key) return kAllProperties[i];
  }
  return std::nullopt;
}

}  // namespace pcorder
