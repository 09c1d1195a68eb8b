#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "ompc/errors.h"
#include "ompc/eval.h"

namespace ompc {

namespace {

  constexpr double kPi = 3.14159265358979323846;
  constexpr double kCubeCenter = 128.0;

  using Vec3 = std::array<double, 3>;

  double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

  uint64_t splitmix(uint64_t x)
  {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  enum class Shape { Sphere, Torus, Box };

  struct Body {
    Shape shape = Shape::Sphere;
    Vec3 dims{};  // sphere: r; torus: R, r; box: half extents
    int id = 0;

    double area() const
    {
      switch (shape) {
      case Shape::Sphere: return 4 * kPi * dims[0] * dims[0];
      case Shape::Torus: return 4 * kPi * kPi * dims[0] * dims[1];
      case Shape::Box:
        return 8 * (dims[0] * dims[1] + dims[1] * dims[2] + dims[0] * dims[2]);
      }
      return 0;
    }

    double extent() const { return shape == Shape::Torus ? dims[0] + dims[1] : std::max({dims[0], dims[1], dims[2]}); }

    Vec3 sample(std::mt19937_64& rng) const
    {
      switch (shape) {
      case Shape::Sphere: {
        const double z = 2 * uniform01(rng) - 1, phi = 2 * kPi * uniform01(rng);
        const double s = std::sqrt(std::max(0.0, 1 - z * z));
        return {dims[0] * s * std::cos(phi), dims[0] * s * std::sin(phi), dims[0] * z};
      }
      case Shape::Torus: {
        // Rejection on the area element keeps the density uniform.
        for (;;) {
          const double theta = 2 * kPi * uniform01(rng), phi = 2 * kPi * uniform01(rng);
          const double w = (dims[0] + dims[1] * std::cos(phi)) / (dims[0] + dims[1]);
          if (uniform01(rng) > w)
            continue;
          const double ring = dims[0] + dims[1] * std::cos(phi);
          return {ring * std::cos(theta), ring * std::sin(theta), dims[1] * std::sin(phi)};
        }
      }
      case Shape::Box: {
        const std::array<double, 3> faceArea = {dims[1] * dims[2], dims[0] * dims[2],
                                                dims[0] * dims[1]};
        double pick = uniform01(rng) * (faceArea[0] + faceArea[1] + faceArea[2]);
        int axis = 0;
        while (axis < 2 && pick >= faceArea[size_t(axis)]) {
          pick -= faceArea[size_t(axis)];
          axis++;
        }
        Vec3 p;
        for (int a = 0; a < 3; a++)
          p[size_t(a)] = (2 * uniform01(rng) - 1) * dims[size_t(a)];
        p[size_t(axis)] = uniform01(rng) < 0.5 ? -dims[size_t(axis)] : dims[size_t(axis)];
        return p;
      }
      }
      return {};
    }
  };

  struct Pose {
    Vec3 translation{};
    int rotationAxis = 2;
    double angle = 0;  // radians

    Vec3 apply(const Vec3& p) const
    {
      const double c = std::cos(angle), s = std::sin(angle);
      const int a = (rotationAxis + 1) % 3, b = (rotationAxis + 2) % 3;
      Vec3 q = p;
      q[size_t(a)] = c * p[size_t(a)] - s * p[size_t(b)];
      q[size_t(b)] = s * p[size_t(a)] + c * p[size_t(b)];
      for (int i = 0; i < 3; i++)
        q[size_t(i)] += translation[size_t(i)];
      return q;
    }
  };

  // Smooth gradient over body coordinates plus noise fixed to the body
  // surface, so colors travel with the body.
  Rgb bodyColor(const Body& body, const Vec3& local, uint64_t seed)
  {
    const double e = body.extent();
    std::array<int, 3> c;
    uint64_t h = splitmix(seed ^ (uint64_t(body.id) << 48));
    for (int i = 0; i < 3; i++) {
      c[size_t(i)] = int(std::lround(128 + 100 * local[size_t((i + body.id) % 3)] / e));
      h = splitmix(h ^ uint64_t(int64_t(std::lround(local[size_t(i)] * 2))));
    }
    for (int i = 0; i < 3; i++)
      c[size_t(i)] += int((h >> (16 * i)) % 25) - 12;
    return {uint8_t(std::clamp(c[0], 0, 255)), uint8_t(std::clamp(c[1], 0, 255)),
            uint8_t(std::clamp(c[2], 0, 255))};
  }

  struct PlacedBody {
    Body body;
    std::vector<Vec3> samples;  // fixed per sequence
  };

  PointCloud render(const std::vector<PlacedBody>& bodies, const std::vector<Pose>& poses,
                    uint64_t seed)
  {
    PointCloud cloud;
    cloud.bitDepth = 8;
    for (size_t b = 0; b < bodies.size(); b++)
      for (const Vec3& local : bodies[b].samples) {
        const Vec3 w = poses[b].apply(local);
        Point3 p{int32_t(std::lround(w[0])), int32_t(std::lround(w[1])),
                 int32_t(std::lround(w[2]))};
        if (p.x < 0 || p.y < 0 || p.z < 0 || p.x > 255 || p.y > 255 || p.z > 255)
          continue;
        cloud.points.push_back(p);
        cloud.colors.push_back(bodyColor(bodies[b].body, local, seed));
      }
    removeDuplicatePoints(cloud);
    return cloud;
  }

  PlacedBody makeBody(Shape shape, Vec3 dims, int id, int points, std::mt19937_64& rng)
  {
    PlacedBody pb;
    pb.body = {shape, dims, id};
    const int n = points > 0 ? points : int(std::ceil(4 * pb.body.area()));
    pb.samples.reserve(size_t(n));
    for (int i = 0; i < n; i++)
      pb.samples.push_back(pb.body.sample(rng));
    return pb;
  }

}  // namespace

SequenceKind
parseSequenceKind(const std::string& name)
{
  if (name == "sphere")
    return SequenceKind::Sphere;
  if (name == "torus")
    return SequenceKind::Torus;
  if (name == "blobs")
    return SequenceKind::Blobs;
  if (name == "orbit")
    return SequenceKind::Orbit;
  throw DomainError("unknown sequence kind '" + name + "'");
}

std::string
sequenceKindName(SequenceKind kind)
{
  switch (kind) {
  case SequenceKind::Sphere: return "sphere";
  case SequenceKind::Torus: return "torus";
  case SequenceKind::Blobs: return "blobs";
  case SequenceKind::Orbit: return "orbit";
  }
  return "?";
}

// sphere: radius 60 centred at (128 + t, 128, 128) in frame t.
// torus: R 56, r 20, spinning about x by 3 degrees per frame.
// blobs: five drifting spheres.
// orbit: a sphere, a spinning torus and a spinning box circling the cube
// centre in the xy plane, 5 degrees per frame.
std::vector<PointCloud>
generateSequence(SequenceKind kind, int frames, uint64_t seed, int points)
{
  if (frames < 1)
    throw DomainError("frame count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<PlacedBody> bodies;
  std::vector<std::vector<Pose>> poses(static_cast<size_t>(frames));
  const double deg = kPi / 180;

  switch (kind) {
  case SequenceKind::Sphere:
    bodies.push_back(makeBody(Shape::Sphere, {60, 0, 0}, 0, points, rng));
    for (int t = 0; t < frames; t++)
      poses[size_t(t)] = {Pose{{kCubeCenter + t, kCubeCenter, kCubeCenter}, 2, 0}};
    break;
  case SequenceKind::Torus:
    bodies.push_back(makeBody(Shape::Torus, {56, 20, 0}, 0, points, rng));
    for (int t = 0; t < frames; t++)
      poses[size_t(t)] = {Pose{{kCubeCenter, kCubeCenter, kCubeCenter}, 0, 3 * deg * t}};
    break;
  case SequenceKind::Blobs: {
    std::vector<Vec3> start, velocity;
    for (int b = 0; b < 5; b++) {
      const double r = 14 + 16 * uniform01(rng);
      Vec3 c, v;
      for (int i = 0; i < 3; i++) {
        c[size_t(i)] = 70 + 116 * uniform01(rng);
        v[size_t(i)] = 3 * uniform01(rng) - 1.5;
      }
      start.push_back(c);
      velocity.push_back(v);
      bodies.push_back(makeBody(Shape::Sphere, {r, 0, 0}, b, points, rng));
    }
    for (int t = 0; t < frames; t++)
      for (size_t b = 0; b < bodies.size(); b++) {
        Vec3 c;
        for (int i = 0; i < 3; i++)
          c[size_t(i)] = start[b][size_t(i)] + velocity[b][size_t(i)] * t;
        poses[size_t(t)].push_back({c, 2, 0});
      }
    break;
  }
  case SequenceKind::Orbit: {
    bodies.push_back(makeBody(Shape::Sphere, {22, 0, 0}, 0, points, rng));
    bodies.push_back(makeBody(Shape::Torus, {20, 7, 0}, 1, points, rng));
    bodies.push_back(makeBody(Shape::Box, {20, 14, 9}, 2, points, rng));
    const double phase0 = 360 * uniform01(rng);
    const std::array<int, 3> spinAxis = {2, 0, 1};
    const std::array<double, 3> spinRate = {0, 6, 4};
    for (int t = 0; t < frames; t++)
      for (size_t b = 0; b < bodies.size(); b++) {
        const double a = (phase0 + 120.0 * double(b) + 5.0 * t) * deg;
        const Vec3 c{kCubeCenter + 64 * std::cos(a), kCubeCenter + 64 * std::sin(a),
                     kCubeCenter + 10 * std::sin(a + double(b))};
        poses[size_t(t)].push_back({c, spinAxis[b], spinRate[b] * deg * t});
      }
    break;
  }
  }

  std::vector<PointCloud> out;
  out.reserve(size_t(frames));
  for (int t = 0; t < frames; t++)
    out.push_back(render(bodies, poses[size_t(t)], seed));
  return out;
}

}  // namespace ompc
