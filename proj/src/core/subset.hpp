#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace entroflow {

// A subset of a ground set, stored as a bitmask in ground-set order.
// Obtain these from GroundSet::subset(); raw masks stay internal.
class SubsetIndex {
 public:
  constexpr SubsetIndex() = default;
  constexpr explicit SubsetIndex(std::uint32_t mask) : mask_(mask) {}

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(SubsetIndex other) const { return (mask_ & other.mask_) == other.mask_; }
  constexpr bool has(int element) const { return (mask_ >> element) & 1U; }
  int count() const { return __builtin_popcount(mask_); }

  friend constexpr SubsetIndex operator|(SubsetIndex a, SubsetIndex b) { return SubsetIndex(a.mask_ | b.mask_); }
  friend constexpr SubsetIndex operator&(SubsetIndex a, SubsetIndex b) { return SubsetIndex(a.mask_ & b.mask_); }
  friend constexpr SubsetIndex operator-(SubsetIndex a, SubsetIndex b) { return SubsetIndex(a.mask_ & ~b.mask_); }
  friend constexpr bool operator==(SubsetIndex, SubsetIndex) = default;
  friend constexpr auto operator<=>(SubsetIndex, SubsetIndex) = default;

  static constexpr SubsetIndex singleton(int element) { return SubsetIndex(1U << element); }

 private:
  std::uint32_t mask_ = 0;
};

class GroundSet {
 public:
  static constexpr int kMaxSize = 24;

  GroundSet() = default;
  // Labels must be distinct and nonempty; at least one element.
  explicit GroundSet(std::vector<std::string> labels);
  // Labels "1", ..., "n".
  static GroundSet numbered(int n);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int element) const { return labels_.at(element); }
  std::optional<int> index_of(std::string_view label) const;

  SubsetIndex subset(std::span<const std::string> labels) const;
  SubsetIndex subset(std::initializer_list<std::string_view> labels) const;
  SubsetIndex element(std::string_view label) const;
  SubsetIndex full() const { return SubsetIndex((1U << size()) - 1U); }
  std::uint32_t subset_count() const { return 1U << size(); }

  std::vector<std::string> labels_of(SubsetIndex s) const;
  // "{1,2}" style.
  std::string format(SubsetIndex s) const;
  // Inverse of format(); accepts "{a,b}" or "a,b".
  SubsetIndex parse(std::string_view text) const;

  friend bool operator==(const GroundSet&, const GroundSet&) = default;

 private:
  std::vector<std::string> labels_;
};

}  // namespace entroflow
