#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiomap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Point = Eigen::Vector2d;

// Failure classes map one-to-one onto CLI exit codes.
enum class ErrorKind { Input = 2, DataQuality = 3, Infeasible = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error input_error(const std::string& m) { return Error(ErrorKind::Input, m); }
inline Error quality_error(const std::string& m) { return Error(ErrorKind::DataQuality, m); }
inline Error infeasible_error(const std::string& m) { return Error(ErrorKind::Infeasible, m); }

// N x D matrix of dB values, row i-1 holds sample x_i.
struct RssSequence {
    Mat samples;

    RssSequence() = default;
    explicit RssSequence(Mat s);

    long N() const { return static_cast<long>(samples.rows()); }
    long D() const { return static_cast<long>(samples.cols()); }
    // 1-based sample access.
    auto x(long i) const { return samples.row(i - 1).transpose(); }
};

struct SensorLayout {
    std::vector<Point> positions;
    long D() const { return static_cast<long>(positions.size()); }
};

// Boundaries tau_1..tau_{K-1}; tau_0 = 0 and tau_K = N are implied.
struct Segmentation {
    std::vector<long> boundaries;
    long N = 0;

    Segmentation() = default;
    Segmentation(std::vector<long> b, long n) : boundaries(std::move(b)), N(n) {}

    int K() const { return static_cast<int>(boundaries.size()) + 1; }
    // tau_k for k in 0..K.
    long tau(int k) const;
    long segment_length(int k) const { return tau(k) - tau(k - 1); }
    // Throws unless 0 < tau_1 < ... < tau_{K-1} < N and every segment has min_len samples.
    void validate(long min_len = 1) const;
    bool operator==(const Segmentation& o) const { return boundaries == o.boundaries && N == o.N; }
};

enum class WindowMode { Rectangle, Smooth };

struct WindowParams {
    double beta = 1.0;
    WindowMode mode = WindowMode::Smooth;
};

struct SubspaceFeature {
    Vec mu;
    Mat basis;   // D x d, orthonormal columns
    Vec sigma2;  // d
    double noise_var = 1.0;

    long D() const { return static_cast<long>(mu.size()); }
    int dim() const { return static_cast<int>(basis.cols()); }
    void validate() const;
};

using ModelParams = std::vector<SubspaceFeature>;

struct RadioMap {
    ModelParams features;
    std::optional<std::vector<int>> region_ids;  // region_ids[k] = physical region of cluster k+1
    std::string config_hash;
    std::uint64_t seed = 0;

    int K() const { return static_cast<int>(features.size()); }
    void validate() const;
};

}  // namespace radiomap
