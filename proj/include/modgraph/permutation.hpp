#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "modgraph/error.hpp"

namespace modgraph {

/// Bijection of [n] = {1..n}. Stored 0-based internally.
class Permutation {
 public:
  Permutation() = default;

  /// images[i-1] is the image of i; must be a bijection of [n].
  explicit Permutation(const std::vector<int>& images) : image_(images.size()) {
    std::vector<char> hit(images.size(), 0);
    for (std::size_t i = 0; i < images.size(); ++i) {
      int img = images[i];
      if (img < 1 || img > static_cast<int>(images.size()) || hit[img - 1])
        throw Error(ErrorCode::kInvalidArgument, "not a permutation of [n]");
      hit[img - 1] = 1;
      image_[i] = img - 1;
    }
  }

  static Permutation identity(int n) {
    Permutation p;
    p.image_.resize(n);
    std::iota(p.image_.begin(), p.image_.end(), 0);
    return p;
  }

  /// Builds a permutation of [n] from disjoint cycles, e.g. {{1,5},{2,4}}.
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> images(n);
    std::iota(images.begin(), images.end(), 1);
    for (const auto& c : cycles)
      for (std::size_t k = 0; k < c.size(); ++k) images[c[k] - 1] = c[(k + 1) % c.size()];
    return Permutation(images);
  }

  int size() const { return static_cast<int>(image_.size()); }

  /// Image of i, 1-based.
  int operator()(int i) const { return image_[i - 1] + 1; }

  /// 0-based view used by search code.
  int at(int i) const { return image_[i]; }

  std::vector<int> images() const {
    std::vector<int> out(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) out[i] = image_[i] + 1;
    return out;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] != static_cast<int>(i)) return false;
    return true;
  }

  /// (this * other)(i) = this(other(i)).
  Permutation after(const Permutation& other) const {
    Permutation p;
    p.image_.resize(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) p.image_[i] = image_[other.image_[i]];
    return p;
  }

  Permutation inverse() const {
    Permutation p;
    p.image_.resize(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) p.image_[image_[i]] = static_cast<int>(i);
    return p;
  }

  /// Disjoint-cycle notation without fixed points; "id" for the identity.
  std::string to_string() const {
    std::string out;
    std::vector<char> done(image_.size(), 0);
    for (std::size_t i = 0; i < image_.size(); ++i) {
      if (done[i] || image_[i] == static_cast<int>(i)) continue;
      out += '(';
      std::size_t j = i;
      bool first = true;
      while (!done[j]) {
        done[j] = 1;
        if (!first) out += ' ';
        out += std::to_string(j + 1);
        first = false;
        j = static_cast<std::size_t>(image_[j]);
      }
      out += ')';
    }
    return out.empty() ? "id" : out;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

}  // namespace modgraph
