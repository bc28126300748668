#include "core/subset.hpp"

#include <set>
#include <stdexcept>

namespace entroflow {

GroundSet::GroundSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("ground set must have at least one element");
  if (labels_.size() > static_cast<std::size_t>(kMaxSize))
    throw std::invalid_argument("ground set larger than " + std::to_string(kMaxSize));
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw std::invalid_argument("empty ground set label");
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate ground set label '" + l + "'");
  }
}

GroundSet GroundSet::numbered(int n) {
  std::vector<std::string> labels;
  for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
  return GroundSet(std::move(labels));
}

std::optional<int> GroundSet::index_of(std::string_view label) const {
  for (int i = 0; i < size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

SubsetIndex GroundSet::element(std::string_view label) const {
  auto i = index_of(label);
  if (!i) throw std::invalid_argument("unknown ground set label '" + std::string(label) + "'");
  return SubsetIndex::singleton(*i);
}

SubsetIndex GroundSet::subset(std::span<const std::string> labels) const {
  SubsetIndex s;
  for (const auto& l : labels) s = s | element(l);
  return s;
}

SubsetIndex GroundSet::subset(std::initializer_list<std::string_view> labels) const {
  SubsetIndex s;
  for (auto l : labels) s = s | element(l);
  return s;
}

std::vector<std::string> GroundSet::labels_of(SubsetIndex s) const {
  std::vector<std::string> out;
  for (int i = 0; i < size(); ++i)
    if (s.has(i)) out.push_back(labels_[i]);
  return out;
}

std::string GroundSet::format(SubsetIndex s) const {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < size(); ++i) {
    if (!s.has(i)) continue;
    if (!first) out += ",";
    out += labels_[i];
    first = false;
  }
  return out + "}";
}

SubsetIndex GroundSet::parse(std::string_view text) const {
  if (!text.empty() && text.front() == '{') text.remove_prefix(1);
  if (!text.empty() && text.back() == '}') text.remove_suffix(1);
  SubsetIndex s;
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) s = s | element(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return s;
}

}  // namespace entroflow
