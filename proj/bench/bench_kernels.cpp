// Timing harness comparing the serial reference loops against the OpenMP
// kernels: FEM element precompute, BEM matrix assembly, and the enclosure
// direction sweep. Build and run:
//   ./bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <vector>

#include "pcond/enclosure.hpp"
#include "pcond/layer_potential.hpp"
#include "pcond/parallel.hpp"

using namespace pcond;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double timed(const char* name, int threads, Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  double s = seconds_since(t0);
  std::printf("  %-28s threads=%d  %8.3fs\n", name, threads, s);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : max_threads();
  std::printf("kernel benchmark (serial reference vs OpenMP, %d threads)\n", threads);

  auto sc = geom::build_scenario(geom::Circle{{0, 0}, 1.0},
                                 {{geom::Circle{{0.2, 0}, 0.3}, geom::InclusionKind::Superconducting}},
                                 1.0, 2.0);
  auto m = mesh::triangulate(sc, 0.015);
  std::printf("mesh: %zu nodes, %zu triangles\n", m.node_count(), m.triangle_count());

  // FEM element kernel: per-triangle p1 gradients and element matrices.
  {
    std::vector<double> sink(m.triangle_count());
    auto body = [&](std::size_t t) {
      auto g = m.p1_gradients(static_cast<int>(t));
      double a = m.triangle_area(static_cast<int>(t));
      double acc = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc += a * g[i].dot(g[j]);
      sink[t] = acc;
    };
    double ts = timed("fem element kernel (serial)", 1, [&] {
      for (int rep = 0; rep < 40; ++rep) serial_for(m.triangle_count(), body);
    });
    double tp = timed("fem element kernel (omp)", threads, [&] {
      for (int rep = 0; rep < 40; ++rep) parallel_for(m.triangle_count(), threads, body);
    });
    std::printf("  speedup %.2fx\n", ts / tp);
  }

  // BEM matrix assembly by row.
  {
    auto outer = bem::PanelCurve::from_shape(geom::Circle{{0, 0}, 1.0}, 512);
    bem::LogScale scale{8.0};
    Eigen::MatrixXd S(outer.size(), outer.size());
    auto body = [&](std::size_t i) {
      for (std::size_t j = 0; j < outer.size(); ++j)
        S(i, j) = i == j ? 0.0 : bem::kernel(outer.mid[i], outer.mid[j], scale.r) * outer.len[j];
    };
    double ts = timed("bem matrix rows (serial)", 1, [&] {
      for (int rep = 0; rep < 20; ++rep) serial_for(outer.size(), body);
    });
    double tp = timed("bem matrix rows (omp)", threads, [&] {
      for (int rep = 0; rep < 20; ++rep) parallel_for(outer.size(), threads, body);
    });
    std::printf("  speedup %.2fx\n", ts / tp);
  }

  // Enclosure direction sweep (independent jobs over a shared mesh cache).
  {
    std::vector<double> grid = {5, 6.5, 8, 10};
    enclosure::HullOptions o1, oN;
    o1.threads = 1;
    oN.threads = threads;
    enclosure::MeshFamily fam_warm(sc);
    for (double tau : grid) {
      fam_warm.mesh_for(tau);
      fam_warm.workspace_for(tau);
    }
    double ts = timed("direction sweep (serial)", 1,
                      [&] { enclosure::reconstruct_hull(fam_warm, 16, grid, o1); });
    double tp = timed("direction sweep (omp)", threads,
                      [&] { enclosure::reconstruct_hull(fam_warm, 16, grid, oN); });
    std::printf("  speedup %.2fx\n", ts / tp);
  }
  return 0;
}
