#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pcorder {

/// The twelve line-pattern properties.
enum class PropertyId : std::uint8_t {
  PosCorrelation,
  NegCorrelation,
  PosVariance,
  NegVariance,
  PosSkewness,
  NegSkewness,
  Outliers,
  DensityChange,
  ClearGrouping,
  SplitUp,
  Neighborhood,
  Fan,
};

inline constexpr std::size_t kPropertyCount = 12;

inline constexpr std::array<PropertyId, kPropertyCount> kAllProperties = {
    PropertyId::PosCorrelation, PropertyId::NegCorrelation, PropertyId::PosVariance,
    PropertyId::NegVariance,    PropertyId::PosSkewness,    PropertyId::NegSkewness,
    PropertyId::Outliers,       PropertyId::DensityChange,  PropertyId::ClearGrouping,
    PropertyId::SplitUp,        PropertyId::Neighborhood,   PropertyId::Fan,
};

/// Dense per-property storage indexed by PropertyId.
template <typename T>
struct PropertyMap {
  std::array<T, kPropertyCount> values{};

  T& operator[](PropertyId p) { return values[static_cast<std::size_t>(p)]; }
  const T& operator[](PropertyId p) const { return values[static_cast<std::size_t>(p)]; }

  bool operator==(const PropertyMap&) const = default;
};

/// Short key used in weight strings and JSON ("pos_corr", "fan", ...).
std::string_view property_key(PropertyId p);
std::optional<PropertyId> property_from_key(std::string_view key);

/// Marginal properties depend on the primary axis only.
constexpr bool is_marginal(PropertyId p) {
  return p == PropertyId::PosSkewness || p == PropertyId::NegSkewness || p == PropertyId::Outliers;
}

}  // namespace pcorder
