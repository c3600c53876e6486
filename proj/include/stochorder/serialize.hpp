#pragma once

#include <string>
#include <vector>

namespace stochorder::serialize {

// 17 significant digits (round-trip fidelity); non-finite values become the
// quoted strings "inf"/"-inf"/"nan" since JSON has no literals for them.
std::string fmt_double_json(double v);
// 12 significant digits for CSV readability.
std::string fmt_double_csv(double v);

// Minimal ordered JSON emitter with fixed field order and fixed float
// formatting so identical inputs serialize byte-identically.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  JsonWriter& value(bool v);
  JsonWriter& value_int(long long v);
  const std::string& str() const { return out_; }

 private:
  void separate();
  void escape_into(const std::string& s);
  std::string out_;
  std::vector<bool> first_;
};

}  // namespace stochorder::serialize
