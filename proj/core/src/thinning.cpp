#include <array>

#include "routepack/skeleton.hpp"

namespace routepack {

namespace {

// P2..P9: clockwise from north.
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

std::array<int, 8> neighborhood(const BinaryImage& img, int x, int y) {
  std::array<int, 8> p{};
  for (int i = 0; i < 8; ++i) p[i] = img.get(x + kDx[i], y + kDy[i]) ? 1 : 0;
  return p;
}

bool deletable(const std::array<int, 8>& p, int subiteration) {
  const int P2 = p[0], P4 = p[2], P6 = p[4], P8 = p[6];
  int b = 0;
  int a = 0;
  for (int i = 0; i < 8; ++i) {
    b += p[i];
    if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
  }
  // b >= 3 (Lu and Wang) keeps 2 px diagonal stairs from eroding away from their ends.
  if (b < 3 || b > 6 || a != 1) return false;
  if (subiteration == 0) return P2 * P4 * P6 == 0 && P4 * P6 * P8 == 0;
  return P2 * P4 * P8 == 0 && P2 * P6 * P8 == 0;
}

// Yokoi connectivity number for 8-connected foreground. A pixel with
// C8 == 1 can be removed without changing topology.
int yokoi_c8(const BinaryImage& img, int x, int y) {
  // x1=E, x2=NE, x3=N, x4=NW, x5=W, x6=SW, x7=S, x8=SE
  constexpr std::array<int, 8> dx = {1, 1, 0, -1, -1, -1, 0, 1};
  constexpr std::array<int, 8> dy = {0, -1, -1, -1, 0, 1, 1, 1};
  std::array<int, 8> inv{};
  for (int i = 0; i < 8; ++i) inv[i] = img.get(x + dx[i], y + dy[i]) ? 0 : 1;
  int c = 0;
  for (int k = 0; k < 8; k += 2) c += inv[k] - inv[k] * inv[(k + 1) % 8] * inv[(k + 2) % 8];
  return c;
}

bool zhang_suen_pass(BinaryImage& img, std::vector<Pixel>& live) {
  bool changed = false;
  std::vector<Pixel> marked;
  BinaryImage mark(img.width(), img.height());
  for (int sub = 0; sub < 2; ++sub) {
    marked.clear();
    for (const Pixel& px : live) {
      if (img.get(px) && deletable(neighborhood(img, px.x, px.y), sub)) {
        marked.push_back(px);
        mark.set(px);
      }
    }
    // Never erase a whole 2x2 block in one step: that deletes a component.
    for (const Pixel& px : marked) {
      if (mark.get(px) && mark.get(px.x + 1, px.y) && mark.get(px.x, px.y + 1) && mark.get(px.x + 1, px.y + 1)) {
        mark.set(px, false);
      }
    }
    for (const Pixel& px : marked) {
      if (mark.get(px)) {
        img.set(px, false);
        mark.set(px, false);
        changed = true;
      }
    }
  }
  std::erase_if(live, [&](const Pixel& px) { return !img.get(px); });
  return changed;
}

bool peel_blocks(BinaryImage& img, const std::vector<Pixel>& live) {
  bool changed = false;
  for (const Pixel& px : live) {
    const int x = px.x, y = px.y;
    if (!(img.get(x, y) && img.get(x + 1, y) && img.get(x, y + 1) && img.get(x + 1, y + 1))) continue;
    const std::array<Pixel, 4> block = {Pixel{x, y}, Pixel{x + 1, y}, Pixel{x, y + 1}, Pixel{x + 1, y + 1}};
    for (const Pixel& c : block) {
      int b = 0;
      for (int i = 0; i < 8; ++i) b += img.get(c.x + kDx[i], c.y + kDy[i]) ? 1 : 0;
      if (b >= 2 && yokoi_c8(img, c.x, c.y) == 1) {
        img.set(c, false);
        changed = true;
        break;
      }
    }
  }
  return changed;
}

}  // namespace

BinaryImage thin(const BinaryImage& input) {
  BinaryImage img = input;
  std::vector<Pixel> live = img.pixels();
  for (;;) {
    while (zhang_suen_pass(img, live)) {
    }
    if (!peel_blocks(img, live)) break;
    std::erase_if(live, [&](const Pixel& px) { return !img.get(px); });
  }
  return img;
}

int crossing_number(const BinaryImage& img, Pixel p) {
  const std::array<int, 8> n = neighborhood(img, p.x, p.y);
  int sum = 0;
  for (int i = 0; i < 8; ++i) sum += n[i] != n[(i + 1) % 8] ? 1 : 0;
  return sum / 2;
}

BifurcationSet detect_bifurcations(const BinaryImage& skeleton) {
  BifurcationSet out;
  for (const Pixel& p : skeleton.pixels()) {
    const int cn = crossing_number(skeleton, p);
    if (cn >= 3) {
      out.bifurcations.push_back(p);
    } else if (cn == 1) {
      out.endpoints.push_back(p);
    }
  }
  return out;
}

Skeleton make_skeleton(BinaryImage thinned) {
  BifurcationSet b = detect_bifurcations(thinned);
  return Skeleton{std::move(thinned), std::move(b.bifurcations), std::move(b.endpoints)};
}

}  // namespace routepack
