#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetvar {

enum class Parity : std::uint8_t { even = 0, odd = 1 };

inline Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<unsigned>(a) ^ static_cast<unsigned>(b));
}
inline unsigned bit(Parity p) { return static_cast<unsigned>(p); }

using FieldId = std::size_t;

struct FieldSpec {
  std::string name;
  Parity parity = Parity::even;
  int charge = 0;

  bool operator==(const FieldSpec&) const = default;
};

/// Base coordinates and the field roster of a single global chart.
/// Field ids are positions in declaration order and fix the canonical
/// ordering of jet variables and contact generators.
class Model {
 public:
  static constexpr std::size_t max_dim = 6;
  static constexpr std::size_t max_fields = (1u << 14) - 1;

  Model() = default;
  explicit Model(std::vector<std::string> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("base dimension must be at least 1");
    if (coords_.size() > max_dim) throw std::invalid_argument("base dimension exceeds 6");
    for (std::size_t i = 0; i < coords_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (coords_[i] == coords_[j]) throw std::invalid_argument("duplicate coordinate " + coords_[i]);
  }

  std::size_t dim() const { return coords_.size(); }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::string& coord(std::size_t i) const { return coords_.at(i); }
  std::optional<std::size_t> find_coord(const std::string& name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return i;
    return std::nullopt;
  }

  FieldId add_field(std::string name, Parity parity, int charge = 0) {
    if (find_field(name) || find_coord(name)) throw std::invalid_argument("duplicate identifier " + name);
    if (fields_.size() >= max_fields) throw std::invalid_argument("too many fields");
    fields_.push_back({std::move(name), parity, charge});
    return fields_.size() - 1;
  }

  std::size_t num_fields() const { return fields_.size(); }
  const FieldSpec& field(FieldId a) const { return fields_.at(a); }
  const std::vector<FieldSpec>& fields() const { return fields_; }
  std::optional<FieldId> find_field(const std::string& name) const {
    for (std::size_t i = 0; i < fields_.size(); ++i)
      if (fields_[i].name == name) return i;
    return std::nullopt;
  }
  void set_charge(FieldId a, int charge) { fields_.at(a).charge = charge; }

  bool operator==(const Model&) const = default;

 private:
  std::vector<std::string> coords_;
  std::vector<FieldSpec> fields_;
};

}  // namespace jetvar
