#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "ioshock/io_table.hpp"

namespace unit {

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ioshock_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);

/// Copy of t with one block replaced.
ioshock::IOTable with_output(const ioshock::IOTable& t, Eigen::VectorXd x);
ioshock::IOTable with_flows(const ioshock::IOTable& t, Eigen::MatrixXd z);

inline std::filesystem::path data_dir() { return IOSHOCK_DATA_DIR; }

}  // namespace unit
