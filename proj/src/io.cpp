#include "penpls/io.hpp"

#include "penpls/error.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace penpls {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset parse_dataset(const std::filesystem::path& path, const std::string& responseColumn, bool responseRequired,
                      int minRows) {
  const std::string text = read_file(path);
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      lines.push_back(rest.substr(0, nl));
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  // Skip a UTF-8 byte order mark and blank lines before the header.
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li == lines.size()) throw DataError("'" + path.string() + "' is empty");
  std::string_view headerLine = lines[li++];
  if (headerLine.starts_with("\xEF\xBB\xBF")) headerLine.remove_prefix(3);
  const auto header = split_fields(headerLine);

  std::set<std::string> seen;
  for (const auto& h : header) {
    if (h.empty()) throw DataError("empty column name in header");
    if (!seen.insert(h).second) throw DataError("duplicate column name '" + h + "'");
  }
  int responseIdx = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == responseColumn) responseIdx = static_cast<int>(c);
  if (responseIdx < 0 && responseRequired) throw DataError("unknown response column '" + responseColumn + "'");

  Dataset ds;
  ds.checksum = fnv1a(text);
  if (responseIdx >= 0) ds.response = responseColumn;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (static_cast<int>(c) != responseIdx) ds.names.push_back(header[c]);

  std::vector<std::vector<double>> rows;
  std::vector<std::string> problems;
  int dataRow = 0;
  for (; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    ++dataRow;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != header.size()) {
      problems.push_back("row " + std::to_string(dataRow) + ": expected " + std::to_string(header.size()) +
                         " cells, found " + std::to_string(fields.size()));
      continue;
    }
    std::vector<double> vals(fields.size());
    bool ok = true;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_double(fields[c]);
      if (!v) {
        problems.push_back("row " + std::to_string(dataRow) + ", column '" + header[c] + "': cannot parse '" +
                           fields[c] + "'");
        ok = false;
      } else {
        vals[c] = *v;
      }
    }
    if (ok) rows.push_back(std::move(vals));
  }
  if (!problems.empty()) {
    std::string msg = "'" + path.string() + "': " + std::to_string(problems.size()) + " invalid cell(s)";
    const std::size_t shown = std::min<std::size_t>(problems.size(), 10);
    for (std::size_t k = 0; k < shown; ++k) msg += "\n  " + problems[k];
    if (shown < problems.size()) msg += "\n  ...";
    throw DataError(msg);
  }
  if (static_cast<int>(rows.size()) < minRows)
    throw DataError("'" + path.string() + "' has " + std::to_string(rows.size()) + " data rows, need at least " +
                    std::to_string(minRows));

  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.X.resize(n, static_cast<Eigen::Index>(ds.names.size()));
  if (responseIdx >= 0) ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<int>(c) == responseIdx)
        ds.y[i] = rows[i][c];
      else
        ds.X(i, j++) = rows[i][c];
    }
  }
  return ds;
}

}  // namespace

Dataset ingest(const std::filesystem::path& path, const std::string& responseColumn) {
  return parse_dataset(path, responseColumn, true, 3);
}

Dataset ingest_optional_response(const std::filesystem::path& path, const std::string& responseColumn,
                                 int minRows) {
  return parse_dataset(path, responseColumn, false, minRows);
}

Eigen::MatrixXd align_columns(const Dataset& data, const std::vector<std::string>& expected) {
  std::map<std::string, Eigen::Index> have;
  for (std::size_t j = 0; j < data.names.size(); ++j) have[data.names[j]] = static_cast<Eigen::Index>(j);
  std::vector<std::string> missing, extra;
  const std::set<std::string> want(expected.begin(), expected.end());
  for (const auto& e : expected)
    if (!have.count(e)) missing.push_back(e);
  for (const auto& n : data.names)
    if (!want.count(n)) extra.push_back(n);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "predictor columns do not match the model;";
    auto list = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k];
      return s;
    };
    if (!missing.empty()) msg += " missing: " + list(missing) + ";";
    if (!extra.empty()) msg += " extra: " + list(extra) + ";";
    msg.pop_back();
    throw DataError(msg);
  }
  Eigen::MatrixXd X(data.X.rows(), static_cast<Eigen::Index>(expected.size()));
  for (std::size_t j = 0; j < expected.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = data.X.col(have[expected[j]]);
  return X;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << format_double(rows(i, j));
    out << '\n';
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- model file ----------------------------------------------------------

namespace {

template <typename Vec>
void write_section(std::ostream& out, const std::string& name, const Vec& v) {
  out << '[' << name << ' ' << v.size() << "]\n";
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(v.size()); ++k) out << format_double(v[k]) << '\n';
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
  return s;
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(line);
    }
  }

  void parse() {
    if (lines_.empty()) fail("empty model file");
    const auto first = lines_[0];
    if (first.rfind("format=", 0) != 0) fail("missing format tag");
    if (first.substr(7) != kModelFormat)
      fail("unsupported model format '" + first.substr(7) + "' (expected " + std::string(kModelFormat) + ")");
    std::size_t i = 1;
    for (; i < lines_.size() && (lines_[i].empty() || lines_[i][0] != '['); ++i) {
      if (lines_[i].empty()) continue;
      const auto eq = lines_[i].find('=');
      if (eq == std::string::npos) fail("malformed line " + std::to_string(i + 1));
      keys_[lines_[i].substr(0, eq)] = lines_[i].substr(eq + 1);
    }
    while (i < lines_.size()) {
      const auto& h = lines_[i];
      if (h.empty()) {
        ++i;
        continue;
      }
      if (h == "[end]") return;
      const auto sp = h.find(' ');
      if (h.front() != '[' || h.back() != ']' || sp == std::string::npos) fail("malformed section header '" + h + "'");
      const auto name = h.substr(1, sp - 1);
      const auto count = parse_int(h.substr(sp + 1, h.size() - sp - 2), "section size");
      std::vector<double> vals;
      for (long k = 0; k < count; ++k) {
        if (++i >= lines_.size()) fail("section '" + name + "' is truncated");
        vals.push_back(number(lines_[i], name));
      }
      sections_[name] = std::move(vals);
      ++i;
    }
    fail("missing [end] marker");
  }

  const std::string& key(const std::string& k) const {
    const auto it = keys_.find(k);
    if (it == keys_.end()) fail("missing key '" + k + "'");
    return it->second;
  }
  double num(const std::string& k) const { return number(key(k), k); }
  long integer(const std::string& k) const { return parse_int(key(k), k); }
  const std::vector<double>& section(const std::string& s) const {
    const auto it = sections_.find(s);
    if (it == sections_.end()) fail("missing section '" + s + "'");
    return it->second;
  }

  [[noreturn]] static void fail(const std::string& msg) { throw DataError("model file: " + msg); }

 private:
  static double number(const std::string& s, const std::string& what) {
    const auto v = parse_double(s);
    if (!v) fail("bad number '" + s + "' in " + what);
    return *v;
  }
  static long parse_int(const std::string& s, const std::string& what) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("bad integer '" + s + "' in " + what);
    return v;
  }

  std::vector<std::string> lines_;
  std::map<std::string, std::string> keys_;
  std::map<std::string, std::vector<double>> sections_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void save_model(std::ostream& out, const ModelFile& file) {
  const GamModel& m = file.model;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << file.datasetChecksum;
  out << "format=" << kModelFormat << '\n'
      << "response=" << file.response << '\n'
      << "predictors=" << join(file.names) << '\n'
      << "variables=" << m.variables() << '\n'
      << "basis_size=" << m.penalty.K << '\n'
      << "diff_order=" << m.penalty.q << '\n'
      << "requested_components=" << m.requestedComponents << '\n'
      << "components=" << m.components << '\n'
      << "intercept=" << format_double(m.intercept) << '\n'
      << "response_scale=" << format_double(m.responseScale) << '\n'
      << "normalize_response=" << (m.normalizeResponse ? 1 : 0) << '\n'
      << "dataset_checksum=" << hex.str() << '\n'
      << "timestamp=" << file.timestamp << '\n';
  write_section(out, "lambdas", m.penalty.lambdas);
  for (int j = 0; j < m.variables(); ++j) {
    const auto& b = m.expansion.basis(j);
    out << "[degree_" << j << " 1]\n" << b.degree() << '\n';
    write_section(out, "knots_" + std::to_string(j), b.knots());
  }
  write_section(out, "column_means", m.columnMeans);
  write_section(out, "beta", m.beta);
  out << "[end]\n";
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  save_model(out, file);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

ModelFile load_model(std::istream& in) {
  ModelReader r(in);
  r.parse();
  ModelFile f;
  f.response = r.key("response");
  {
    const auto& s = r.key("predictors");
    std::string_view rest(s);
    while (!rest.empty()) {
      const auto c = rest.find(',');
      f.names.emplace_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
  }
  const long p = r.integer("variables");
  if (p < 1 || static_cast<long>(f.names.size()) != p) ModelReader::fail("predictor names do not match variable count");
  GamModel& m = f.model;
  m.penalty.K = static_cast<int>(r.integer("basis_size"));
  m.penalty.q = static_cast<int>(r.integer("diff_order"));
  m.penalty.lambdas = r.section("lambdas");
  m.requestedComponents = static_cast<int>(r.integer("requested_components"));
  m.components = static_cast<int>(r.integer("components"));
  m.intercept = r.num("intercept");
  m.responseScale = r.num("response_scale");
  m.normalizeResponse = r.integer("normalize_response") != 0;
  f.timestamp = r.key("timestamp");
  f.datasetChecksum = std::stoull(r.key("dataset_checksum"), nullptr, 16);

  std::vector<SplineBasis> bases;
  for (long j = 0; j < p; ++j) {
    const auto& deg = r.section("degree_" + std::to_string(j));
    if (deg.size() != 1) ModelReader::fail("bad degree section");
    try {
      bases.emplace_back(static_cast<int>(deg[0]), r.section("knots_" + std::to_string(j)));
    } catch (const InvalidConfiguration& e) {
      ModelReader::fail(std::string("variable ") + std::to_string(j) + ": " + e.what());
    }
  }
  m.expansion = BasisExpansion(std::move(bases));
  m.columnMeans = to_vector(r.section("column_means")).transpose();
  m.beta = to_vector(r.section("beta"));
  if (m.columnMeans.size() != m.expansion.columns() || m.beta.size() != m.expansion.columns())
    ModelReader::fail("coefficient length does not match the bases");
  if (static_cast<long>(m.penalty.lambdas.size()) != p) ModelReader::fail("lambda count does not match variables");
  return f;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  return load_model(in);
}

}  // namespace penpls
