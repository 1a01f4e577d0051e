#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gaplab::io {

/// Fixed 12-significant-digit formatting used by every persisted artifact,
/// so reruns of identical configs are byte-identical.
std::string format_g12(double v);

/// Full-precision round-trippable formatting (config snapshots).
std::string format_g17(double v);

/// Minimal JSON document builder with insertion-ordered keys and %.12g
/// number formatting. Values are added leaf-first through the typed
/// setters; nested objects/arrays via child().
class JsonNode {
 public:
  static JsonNode object();
  static JsonNode array();
  static JsonNode number(double v);
  static JsonNode integer(long long v);
  static JsonNode string(std::string v);
  static JsonNode boolean(bool v);

  JsonNode& set(const std::string& key, JsonNode v);  // object
  JsonNode& push(JsonNode v);                         // array
  std::string dump(int indent = 2) const;

 private:
  enum class Type { object, array, number, integer, string, boolean };
  Type type_ = Type::object;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, JsonNode>> children_;

  void dump_to(std::string& out, int indent, int depth) const;
};

void write_text_file(const std::string& path, const std::string& content);

/// CSV with a fixed header; all values rendered with format_g12.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

}  // namespace gaplab::io
