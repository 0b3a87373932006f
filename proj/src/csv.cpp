#include "concord/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "concord/error.hpp"

namespace concord {

namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

using Record = std::vector<Field>;

std::vector<Record> parse_records(std::istream& in) {
  std::string data(std::istreambuf_iterator<char>(in), {});
  std::vector<Record> records;
  Record rec;
  Field field;
  bool in_quotes = false;
  const auto end_field = [&] {
    rec.push_back(std::move(field));
    field = {};
  };
  const auto end_record = [&] {
    end_field();
    const bool blank = rec.size() == 1 && !rec[0].quoted && rec[0].text.empty();
    if (!blank) records.push_back(std::move(rec));
    rec = {};
  };
  for (std::size_t p = 0; p < data.size(); ++p) {
    const char c = data[p];
    if (in_quotes) {
      if (c == '"') {
        if (p + 1 < data.size() && data[p + 1] == '"') {
          field.text += '"';
          ++p;
        } else {
          in_quotes = false;
        }
      } else {
        field.text += c;
      }
      continue;
    }
    switch (c) {
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      case '"':
        if (field.text.empty() && !field.quoted) {
          in_quotes = true;
          field.quoted = true;
        } else {
          field.text += c;
        }
        break;
      default:
        field.text += c;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field");
  if (!field.text.empty() || field.quoted || !rec.empty()) end_record();
  return records;
}

std::string trimmed(const Field& f) {
  if (f.quoted) return f.text;
  const auto a = f.text.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = f.text.find_last_not_of(" \t");
  return f.text.substr(a, b - a + 1);
}

bool is_missing(const std::string& tok, const CsvOptions& opts) {
  return std::find(opts.missing_tokens.begin(), opts.missing_tokens.end(), tok) !=
         opts.missing_tokens.end();
}

Real parse_value(const std::string& tok, const CsvOptions& opts, std::size_t line,
                 const std::string& col) {
  double v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("line " + std::to_string(line) + ", column " + col +
                     ": unparseable token \"" + tok + "\"");
  if (opts.integer_mode && v != std::round(v))
    throw ParseError("line " + std::to_string(line) + ", column " + col +
                     ": non-integer rating \"" + tok + "\" in integer mode");
  return v;
}

void append_field(std::string& out, const std::string& text) {
  const bool needs_quotes =
      text.find_first_of(",\"\n\r") != std::string::npos ||
      (!text.empty() && (text.front() == ' ' || text.back() == ' '));
  if (!needs_quotes) {
    out += text;
    return;
  }
  out += '"';
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string format_value(Real v, bool integer_mode) {
  if (integer_mode && v == std::round(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

LoadResult read_csv(std::istream& in, const CsvOptions& opts) {
  const auto records = parse_records(in);
  if (records.empty()) throw ParseError("empty file");
  const Record& header = records.front();
  if (header.size() < 2)
    throw ParseError("header must name an id column and at least one provider");
  const std::size_t width = header.size();
  const Index n = static_cast<Index>(width - 1);

  RatingMatrix M;
  M.integer_mode = opts.integer_mode;
  M.id_label = trimmed(header[0]);
  for (std::size_t j = 1; j < width; ++j) M.col_labels.push_back(trimmed(header[j]));

  std::vector<std::string> labels;
  std::vector<Vector> rows;
  LoadResult out;
  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    const Record& r = records[rec];
    const std::size_t line = rec + 1;
    if (r.size() != width)
      throw ParseError("line " + std::to_string(line) + " has " +
                       std::to_string(r.size()) + " fields, expected " +
                       std::to_string(width));
    Vector v(n);
    bool any = false;
    for (Index j = 0; j < n; ++j) {
      const std::string tok = trimmed(r[j + 1]);
      if (!r[j + 1].quoted && is_missing(tok, opts)) {
        v(j) = kMissing;
        continue;
      }
      v(j) = parse_value(tok, opts, line, M.col_labels[j]);
      any = true;
    }
    if (!any) {
      ++out.dropped_rows;
      out.dropped_labels.push_back(trimmed(r[0]));
      continue;
    }
    labels.push_back(trimmed(r[0]));
    rows.push_back(std::move(v));
  }
  if (rows.empty()) throw DataError("no usable rows: every subject is fully missing");

  M.values.resize(static_cast<Index>(rows.size()), n);
  for (Index i = 0; i < M.values.rows(); ++i) M.values.row(i) = rows[i].transpose();
  M.row_labels = std::move(labels);
  out.matrix = std::move(M);
  validate(out.matrix);
  return out;
}

LoadResult load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_csv(in, opts);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_csv(const RatingMatrix& M, std::ostream& out) {
  std::string line;
  append_field(line, M.id_label);
  for (const auto& c : M.col_labels) {
    line += ',';
    append_field(line, c);
  }
  out << line << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    line.clear();
    append_field(line, M.row_labels[i]);
    for (Index j = 0; j < M.cols(); ++j) {
      line += ',';
      if (M.observed(i, j)) append_field(line, format_value(M.values(i, j), M.integer_mode));
    }
    out << line << '\n';
  }
}

void save_csv(const RatingMatrix& M, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(M, out);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace concord
