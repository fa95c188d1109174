#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "subwave/circle.hpp"
#include "subwave/elliptic.hpp"
#include "subwave/grid.hpp"

namespace subwave {

/// Shortest round-trip text for a double ("%.17g").
std::string format_double(double v);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
/// First 16 hex digits of the SHA-256 of Topography::describe().
std::string topography_hash(const Topography& topo);

/// One text line "SUBWAVE1 key=value ..." followed by row-major little-endian
/// float64 data (re, im pairs when complex).
struct GridFileHeader {
  int version = 1;
  int n1 = 0;
  int n2 = 0;
  double x1_min = 0.0;
  double x1_max = 0.0;
  double lambda = 0.0;
  std::string topography;
  bool complex = true;
  std::map<std::string, std::string> extra;  // e.g. step, time

  std::string line() const;
  static GridFileHeader parse(const std::string& line);
};

/// Writes values (i outer, j inner) of a grid field.
void write_grid_file(const std::filesystem::path& path, const WaveField& field,
                     const std::map<std::string, std::string>& extra = {});
struct GridFile {
  GridFileHeader header;
  Eigen::VectorXcd values;
};
GridFile read_grid_file(const std::filesystem::path& path);
/// Reads a grid file and rebuilds the field on `topo`; throws ConfigError if
/// the topography hash or the shape disagrees.
WaveField read_wave_field(const std::filesystem::path& path, const Topography& topo);

/// Dense complex matrix in the same container: header with rows, cols and
/// kind=matrix, data row-major.
void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                       double lambda, const std::string& topography);
Eigen::MatrixXcd read_matrix_file(const std::filesystem::path& path);

/// CSV "j,k,re,im" with j, k the Fourier modes of the CircleForm layout.
void write_mode_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& m, int K);
void write_form_file(const std::filesystem::path& path, const CircleForm& v);
/// CSV "epsilon,h1_diff,floor".
void write_lap_csv(const std::filesystem::path& path, const LapSweep& sweep);
/// Text file of "key=value" lines in the given order.
void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& entries);

/// Output files of a run with their checksums; written last as manifest.txt.
class Manifest {
 public:
  Manifest(std::filesystem::path out_dir, std::string config_hash);
  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path(const std::string& relative) const { return dir_ / relative; }
  void add(const std::string& relative);
  /// Writes "config_sha256=<hash>" then "<sha256>  <file>" lines sorted by name.
  void write(const std::string& name = "manifest.txt") const;

 private:
  std::filesystem::path dir_;
  std::string config_hash_;
  std::vector<std::string> files_;
};

}  // namespace subwave
