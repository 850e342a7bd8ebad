#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rigidflow {

// Dense row-major (H, W, C) array. All per-pixel maps in the pipeline
// (points, flow, rotations, labels, ...) are stored in this container.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, T fill = T{})
      : h_(height), w_(width), c_(channels) {
    if (height <= 0 || width <= 0 || channels <= 0)
      throw std::invalid_argument("Image: dimensions must be positive");
    data_.assign(static_cast<size_t>(h_) * w_ * c_, fill);
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c, int ch = 0) {
    return data_[(static_cast<size_t>(r) * w_ + c) * c_ + ch];
  }
  const T& operator()(int r, int c, int ch = 0) const {
    return data_[(static_cast<size_t>(r) * w_ + c) * c_ + ch];
  }

  T* pixel(int r, int c) { return &data_[(static_cast<size_t>(r) * w_ + c) * c_]; }
  const T* pixel(int r, int c) const {
    return &data_[(static_cast<size_t>(r) * w_ + c) * c_];
  }

  Eigen::Vector3d vec3(int r, int c) const {
    const T* p = pixel(r, c);
    return Eigen::Vector3d(double(p[0]), double(p[1]), double(p[2]));
  }
  void set_vec3(int r, int c, const Eigen::Vector3d& v) {
    T* p = pixel(r, c);
    p[0] = T(v.x());
    p[1] = T(v.y());
    p[2] = T(v.z());
  }

  Eigen::Matrix<double, 6, 1> vec6(int r, int c) const {
    const T* p = pixel(r, c);
    Eigen::Matrix<double, 6, 1> v;
    for (int i = 0; i < 6; ++i) v[i] = double(p[i]);
    return v;
  }
  void set_vec6(int r, int c, const Eigen::Matrix<double, 6, 1>& v) {
    T* p = pixel(r, c);
    for (int i = 0; i < 6; ++i) p[i] = T(v[i]);
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Image& o) const {
    return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }
  bool same_plane(const Image& o) const { return h_ == o.h_ && w_ == o.w_; }

  bool operator==(const Image& o) const {
    return same_shape(o) && data_ == o.data_;
  }

 private:
  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<T> data_;
};

using Imaged = Image<double>;
using Imagef = Image<float>;
using Imagei = Image<int32_t>;

inline void require_same_shape(const Imaged& a, const Imaged& b,
                               const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string("shape mismatch in ") + what);
}

}  // namespace rigidflow
