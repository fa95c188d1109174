#include "subwave/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace subwave {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string hex_digest(const unsigned char* md, unsigned len) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (unsigned k = 0; k < len; ++k) {
    out += digits[md[k] >> 4];
    out += digits[md[k] & 15];
  }
  return out;
}

struct DigestContext {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), EVP_MD_CTX_free};
  DigestContext() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
      throw Error("IOError", "SHA-256 initialization failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx.get(), data, n); }
  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    return hex_digest(md, len);
  }
};

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("IOError", "cannot write " + path.string());
  return os;
}

void write_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  os.write(bytes, 8);
}

double read_le(std::istream& is) {
  char bytes[8];
  if (!is.read(bytes, 8)) throw Error("IOError", "truncated binary data");
  std::uint64_t bits;
  std::memcpy(&bits, bytes, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

std::map<std::string, std::string> parse_pairs(const std::string& line, std::string& magic) {
  std::istringstream is(line);
  is >> magic;
  std::map<std::string, std::string> kv;
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

std::string take(std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("header is missing '" + key + "'");
  std::string v = it->second;
  kv.erase(it);
  return v;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  DigestContext d;
  d.update(data.data(), data.size());
  return d.finish();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("IOError", "cannot read " + path.string());
  DigestContext d;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    d.update(buf, std::size_t(is.gcount()));
  }
  return d.finish();
}

std::string topography_hash(const Topography& topo) {
  return sha256_hex(topo.describe()).substr(0, 16);
}

std::string GridFileHeader::line() const {
  std::ostringstream os;
  os << "SUBWAVE1 version=" << version << " n1=" << n1 << " n2=" << n2
     << " x1_min=" << format_double(x1_min) << " x1_max=" << format_double(x1_max)
     << " lambda=" << format_double(lambda) << " topography=" << topography
     << " kind=" << (complex ? "complex" : "real");
  for (const auto& [k, v] : extra) os << ' ' << k << '=' << v;
  return os.str();
}

GridFileHeader GridFileHeader::parse(const std::string& line) {
  std::string magic;
  auto kv = parse_pairs(line, magic);
  if (magic != "SUBWAVE1") throw ConfigError("not a SUBWAVE1 file");
  GridFileHeader h;
  h.version = std::stoi(take(kv, "version"));
  if (h.version != 1) throw ConfigError("unsupported grid file version");
  h.n1 = std::stoi(take(kv, "n1"));
  h.n2 = std::stoi(take(kv, "n2"));
  h.x1_min = std::stod(take(kv, "x1_min"));
  h.x1_max = std::stod(take(kv, "x1_max"));
  h.lambda = std::stod(take(kv, "lambda"));
  h.topography = take(kv, "topography");
  const std::string kind = take(kv, "kind");
  if (kind != "complex" && kind != "real") throw ConfigError("unknown value kind '" + kind + "'");
  h.complex = kind == "complex";
  h.extra = std::move(kv);
  return h;
}

void write_grid_file(const fs::path& path, const WaveField& field,
                     const std::map<std::string, std::string>& extra) {
  const BoundaryGrid& g = field.grid;
  GridFileHeader h;
  h.n1 = g.n1();
  h.n2 = g.n2();
  h.x1_min = g.x1_min();
  h.x1_max = g.x1_max();
  h.lambda = field.lambda;
  h.topography = topography_hash(g.topography());
  h.extra = extra;
  std::ofstream os = open_out(path, true);
  os << h.line() << '\n';
  for (int i = 0; i <= g.n1(); ++i)
    for (int j = 0; j <= g.n2(); ++j) {
      const Complex v = field.values[g.index(i, j)];
      write_le(os, v.real());
      write_le(os, v.imag());
    }
}

GridFile read_grid_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("IOError", "cannot read " + path.string());
  std::string line;
  std::getline(is, line);
  GridFile f{GridFileHeader::parse(line), {}};
  const Eigen::Index n = Eigen::Index(f.header.n1 + 1) * (f.header.n2 + 1);
  f.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = read_le(is);
    const double im = f.header.complex ? read_le(is) : 0.0;
    f.values[k] = Complex(re, im);
  }
  return f;
}

WaveField read_wave_field(const fs::path& path, const Topography& topo) {
  GridFile f = read_grid_file(path);
  if (f.header.topography != topography_hash(topo))
    throw ConfigError(path.string() + " was written for a different topography");
  WaveField w(BoundaryGrid(topo, f.header.x1_min, f.header.x1_max, f.header.n1, f.header.n2),
              f.header.lambda);
  w.values = std::move(f.values);
  return w;
}

void write_matrix_file(const fs::path& path, const Eigen::MatrixXcd& m, double lambda,
                       const std::string& topography) {
  std::ofstream os = open_out(path, true);
  os << "SUBWAVE1 version=1 kind=matrix rows=" << m.rows() << " cols=" << m.cols()
     << " lambda=" << format_double(lambda) << " topography=" << topography << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      write_le(os, m(r, c).real());
      write_le(os, m(r, c).imag());
    }
}

Eigen::MatrixXcd read_matrix_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("IOError", "cannot read " + path.string());
  std::string line, magic;
  std::getline(is, line);
  auto kv = parse_pairs(line, magic);
  if (magic != "SUBWAVE1" || take(kv, "kind") != "matrix")
    throw ConfigError("not a SUBWAVE1 matrix file");
  const int rows = std::stoi(take(kv, "rows")), cols = std::stoi(take(kv, "cols"));
  Eigen::MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double re = read_le(is);
      m(r, c) = Complex(re, read_le(is));
    }
  return m;
}

void write_mode_matrix_csv(const fs::path& path, const Eigen::MatrixXcd& m, int K) {
  std::ofstream os = open_out(path);
  os << "j,k,re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << CircleForm::mode(int(r), K) << ',' << CircleForm::mode(int(c), K) << ','
         << format_double(m(r, c).real()) << ',' << format_double(m(r, c).imag()) << '\n';
}

void write_form_file(const fs::path& path, const CircleForm& v) {
  std::ofstream os = open_out(path);
  write_form_csv(os, v);
}

void write_lap_csv(const fs::path& path, const LapSweep& sweep) {
  std::ofstream os = open_out(path);
  os << "epsilon,h1_diff,floor\n";
  for (const LapRow& r : sweep.rows)
    os << format_double(r.epsilon) << ',' << format_double(r.h1_diff) << ','
       << format_double(sweep.floor) << '\n';
}

void write_report(const fs::path& path,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream os = open_out(path);
  for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
}

Manifest::Manifest(fs::path out_dir, std::string config_hash)
    : dir_(std::move(out_dir)), config_hash_(std::move(config_hash)) {
  fs::create_directories(dir_);
}

void Manifest::add(const std::string& relative) {
  if (std::find(files_.begin(), files_.end(), relative) == files_.end())
    files_.push_back(relative);
}

void Manifest::write(const std::string& name) const {
  std::vector<std::string> files = files_;
  std::sort(files.begin(), files.end());
  std::ofstream os = open_out(dir_ / name);
  os << "config_sha256=" << config_hash_ << '\n';
  for (const auto& f : files) os << sha256_file(dir_ / f) << "  " << f << '\n';
}

}  // namespace subwave
