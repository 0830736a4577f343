#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dali {

/// Marker distinguishing a plain atom from the past/present views of an event.
enum class Marker { plain, past, present };

/// A propositional atom. Past and present markers wrap a base event atom,
/// written `past(e)` and `now(e)` in source text.
struct Atom {
  std::string name;
  Marker marker = Marker::plain;

  Atom() = default;
  explicit Atom(std::string n, Marker m = Marker::plain) : name(std::move(n)), marker(m) {}

  static Atom past(std::string n) { return Atom(std::move(n), Marker::past); }
  static Atom now(std::string n) { return Atom(std::move(n), Marker::present); }

  bool is_plain() const { return marker == Marker::plain; }

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

/// Source-text rendering: `p`, `past(p)`, `now(p)`.
std::string to_string(const Atom& a);

/// Identifier rule shared by the parsers: `[A-Za-z_][A-Za-z0-9_]*`.
bool is_identifier(std::string_view s);

/// Insertion-ordered set of names. Role declarations keep declaration order
/// because the engine cycles through internal events in that order.
class NameSet {
 public:
  NameSet() = default;
  NameSet(std::initializer_list<std::string> names) {
    for (const auto& n : names) insert(n);
  }

  /// Returns false when the name was already present.
  bool insert(const std::string& name) {
    if (contains(name)) return false;
    items_.push_back(name);
    return true;
  }
  bool erase(const std::string& name) {
    auto it = std::find(items_.begin(), items_.end(), name);
    if (it == items_.end()) return false;
    items_.erase(it);
    return true;
  }
  bool contains(std::string_view name) const {
    return std::find(items_.begin(), items_.end(), name) != items_.end();
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::string& front() const { return items_.front(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<std::string>& items() const { return items_; }

  bool operator==(const NameSet&) const = default;

 private:
  std::vector<std::string> items_;
};

}  // namespace dali
