#include "pom/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pom/error.hpp"

namespace pom::io {

namespace {

double component_from_json(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && used > 0) return out;
  }
  throw Error(ErrorCode::ParseError, field + ": expected a number");
}

bool is_scalar_array(const json& j) {
  for (const auto& v : j) {
    if (v.is_array() || v.is_object()) return false;
  }
  return true;
}

void dump_into(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (is_scalar_array(j)) {
        out += '[';
        bool first = true;
        for (const auto& v : j) {
          if (!first) out += ", ";
          first = false;
          dump_into(v, out, indent + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        dump_into(v, out, indent + 1);
      }
      out += '\n' + pad + ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        dump_into(value, out, indent + 1);
      }
      out += '\n' + pad + '}';
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "cannot serialize non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep floats recognizable as floats after a round trip.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

json matrix_to_json(const ComplexMatrix& m) {
  require_valid(m);
  json entries = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, field + ": expected an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    throw Error(ErrorCode::ParseError, field + ".dim: expected a positive integer");
  }
  const auto dim = j["dim"].get<long long>();
  if (dim < 1) throw Error(ErrorCode::ParseError, field + ".dim: expected a positive integer");
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw Error(ErrorCode::ParseError, field + ".entries: expected an array");
  }
  const json& entries = j["entries"];
  if (static_cast<long long>(entries.size()) != dim * dim) {
    std::ostringstream msg;
    msg << field << ".entries: expected " << dim * dim << " entries, found " << entries.size();
    throw Error(ErrorCode::ParseError, msg.str());
  }
  ComplexMatrix m(dim, dim);
  for (long long k = 0; k < dim * dim; ++k) {
    const json& e = entries[static_cast<std::size_t>(k)];
    const std::string where = field + ".entries[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, where + ": expected [re, im]");
    m(k / dim, k % dim) = Complex(component_from_json(e[0], where + "[0]"),
                                  component_from_json(e[1], where + "[1]"));
  }
  if (!m.allFinite()) throw Error(ErrorCode::ParseError, field + ": non-finite entry");
  return m;
}

std::string canonical_dump(const json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += '\n';
  return out;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number for the diagnostic.
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    std::ostringstream msg;
    msg << source << ":" << line << ": " << e.what();
    throw Error(ErrorCode::ParseError, msg.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace pom::io
