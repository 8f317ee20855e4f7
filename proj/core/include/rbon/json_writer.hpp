#pragma once

#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rbon {

// Formats a double with 17 significant digits, which round-trips any IEEE
// binary64 value. Non-finite values become "nan", "inf" or "-inf".
std::string format_real(double value);

// Minimal streaming JSON writer producing compact output. Numbers use
// format_real; non-finite numbers are written as null.
class JsonWriter {
public:
  explicit JsonWriter(std::ostream& out) : out_(out) {}

  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);

  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  template <std::integral T>
    requires(!std::same_as<T, bool> && !std::same_as<T, std::int64_t>)
  JsonWriter& value(T v) {
    return value(static_cast<std::int64_t>(v));
  }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();

  template <typename T>
  JsonWriter& field(std::string_view name, const T& v) {
    key(name);
    return value(v);
  }

private:
  void separate();

  std::ostream& out_;
  // One entry per open container: true once it holds an element.
  std::vector<bool> nonempty_;
  bool after_key_ = false;
};

}  // namespace rbon
