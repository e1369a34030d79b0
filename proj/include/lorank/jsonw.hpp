#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lorank {

/// Formats with 17 significant digits (round-trippable); non-finite values
/// become "null" since JSON has no representation for them.
std::string json_double(double v);
std::string json_escape(const std::string& s);

/// Minimal deterministic JSON emitter: fields appear exactly in insertion
/// order, floats via json_double, no whitespace variation — so identical
/// inputs serialize to identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::uint64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& value_raw(const std::string& raw);  // pre-serialized fragment

  const std::string& str() const { return out_; }

 private:
  void separate();

  std::string out_;
  std::vector<bool> needs_comma_;
};

}  // namespace lorank
