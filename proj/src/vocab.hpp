#ifndef ARBOR_VOCAB_HPP
#define ARBOR_VOCAB_HPP

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace arbor {

inline constexpr const char* kUnknownItem = "<unk>";

// String-to-index map. Input channels reserve index 0 for the learned
// unknown item; target vocabularies do not.
class Vocab {
 public:
  Vocab() = default;
  static Vocab with_unknown() {
    Vocab v;
    v.has_unknown_ = true;
    v.add(kUnknownItem);
    return v;
  }

  int add(std::string_view item) {
    auto it = index_.find(std::string(item));
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(items_.size());
    items_.emplace_back(item);
    index_.emplace(items_.back(), id);
    return id;
  }

  int find(std::string_view item) const {
    auto it = index_.find(std::string(item));
    return it == index_.end() ? -1 : it->second;
  }

  int find_or_unknown(std::string_view item) const {
    int id = find(item);
    if (id >= 0) return id;
    if (!has_unknown_) fail(ErrorCode::Data, "UnknownLabel: '" + std::string(item) + "'");
    return 0;
  }

  const std::string& item(int id) const { return items_.at(id); }
  int size() const { return static_cast<int>(items_.size()); }
  bool has_unknown() const { return has_unknown_; }
  const std::vector<std::string>& items() const { return items_; }

  void restore(std::vector<std::string> items, bool has_unknown) {
    items_ = std::move(items);
    has_unknown_ = has_unknown;
    index_.clear();
    for (std::size_t i = 0; i < items_.size(); ++i)
      index_.emplace(items_[i], static_cast<int>(i));
  }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.items_ == b.items_ && a.has_unknown_ == b.has_unknown_;
  }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> index_;
  bool has_unknown_ = false;
};

}  // namespace arbor

#endif
