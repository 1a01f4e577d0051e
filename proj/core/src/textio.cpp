#include "gaplab/textio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gaplab::io {

std::string format_g12(double v) {
  if (!std::isfinite(v)) return std::signbit(v) ? "-1e999" : (std::isnan(v) ? "nan" : "1e999");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

JsonNode JsonNode::object() {
  JsonNode n;
  n.type_ = Type::object;
  return n;
}
JsonNode JsonNode::array() {
  JsonNode n;
  n.type_ = Type::array;
  return n;
}
JsonNode JsonNode::number(double v) {
  JsonNode n;
  n.type_ = Type::number;
  n.num_ = v;
  return n;
}
JsonNode JsonNode::integer(long long v) {
  JsonNode n;
  n.type_ = Type::integer;
  n.int_ = v;
  return n;
}
JsonNode JsonNode::string(std::string v) {
  JsonNode n;
  n.type_ = Type::string;
  n.str_ = std::move(v);
  return n;
}
JsonNode JsonNode::boolean(bool v) {
  JsonNode n;
  n.type_ = Type::boolean;
  n.bool_ = v;
  return n;
}

JsonNode& JsonNode::set(const std::string& key, JsonNode v) {
  if (type_ != Type::object) throw std::logic_error("JsonNode::set on a non-object");
  children_.emplace_back(key, std::move(v));
  return *this;
}

JsonNode& JsonNode::push(JsonNode v) {
  if (type_ != Type::array) throw std::logic_error("JsonNode::push on a non-array");
  children_.emplace_back(std::string(), std::move(v));
  return *this;
}

namespace {
void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  out += '"';
}
}  // namespace

void JsonNode::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (static_cast<std::size_t>(depth) + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth), ' ');
  switch (type_) {
    case Type::number: {
      const std::string s = format_g12(num_);
      out += (s == "nan") ? "null" : s;
      break;
    }
    case Type::integer: out += std::to_string(int_); break;
    case Type::boolean: out += bool_ ? "true" : "false"; break;
    case Type::string: append_escaped(out, str_); break;
    case Type::object: {
      if (children_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < children_.size(); ++i) {
        out += pad;
        append_escaped(out, children_[i].first);
        out += ": ";
        children_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < children_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "}";
      break;
    }
    case Type::array: {
      if (children_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < children_.size(); ++i) {
        out += pad;
        children_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < children_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "]";
      break;
    }
  }
}

std::string JsonNode::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_text_file: cannot open " + path);
  os << content;
  if (!os) throw std::runtime_error("write_text_file: write failed for " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out += columns[c];
    out += (c + 1 < columns.size()) ? "," : "";
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      throw std::invalid_argument("write_csv: row width does not match header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += format_g12(row[c]);
      out += (c + 1 < row.size()) ? "," : "";
    }
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace gaplab::io
