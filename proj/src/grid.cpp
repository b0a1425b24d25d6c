#include "lcq/grid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace lcq {

void GridSpec::validate() const {
  for (int d : dims)
    if (d < 3) throw precondition_error("GridSpec: each dimension needs at least 3 nodes");
  if (!(h > 0.0)) throw precondition_error("GridSpec: spacing must be positive");
}

std::array<int, 3> GridSpec::coords(long n) const {
  const int i = static_cast<int>(n % dims[0]);
  const long r = n / dims[0];
  return {i, static_cast<int>(r % dims[1]), static_cast<int>(r / dims[1])};
}

Vec3 GridSpec::position(long n) const {
  const auto c = coords(n);
  return origin + h * Vec3(c[0], c[1], c[2]);
}

bool GridSpec::on_boundary(long n) const {
  const auto c = coords(n);
  for (int a = 0; a < 3; ++a)
    if (c[a] == 0 || c[a] == dims[a] - 1) return true;
  return false;
}

GridSpec cube_grid(int n, double half) {
  GridSpec g;
  g.dims = {n, n, n};
  g.h = 2.0 * half / (n - 1);
  g.origin = Vec3(-half, -half, -half);
  g.validate();
  return g;
}

QField::QField(const GridSpec& s) : spec(s), values(s.num_nodes(), Mat3::Zero()), boundary(s.num_nodes(), 0) {
  s.validate();
  for (long n = 0; n < s.num_nodes(); ++n) boundary[n] = s.on_boundary(n) ? 1 : 0;
}

DirectorField::DirectorField(const GridSpec& s) : spec(s), values(s.num_nodes(), Vec3(0, 0, 1)) { s.validate(); }

GradQ fd_gradient(const QField& field, long node) { return fd_gradient_of(field.spec, field.values, node); }

GradU fd_gradient(const DirectorField& field, long node) {
  const auto g = fd_gradient_of(field.spec, field.values, node);
  GradU out;
  for (int k = 0; k < 3; ++k) out.row(k) = g[k].transpose();
  return out;
}

void EnergyModel::validate() const {
  validate_density(density, L, bp.s_plus);
  if (include_bulk && !(L_param > 0.0)) throw precondition_error("EnergyModel: L_param must be positive");
  if (!(M > 0.0)) throw precondition_error("EnergyModel: M must be positive");
}

std::vector<double> node_weights(const GridSpec& spec) {
  std::vector<double> w(spec.num_nodes());
  const double h3 = spec.h * spec.h * spec.h;
  for (long n = 0; n < spec.num_nodes(); ++n) {
    const auto c = spec.coords(n);
    double f = 1.0;
    for (int a = 0; a < 3; ++a)
      if (c[a] == 0 || c[a] == spec.dims[a] - 1) f *= 0.5;
    w[n] = h3 * f;
  }
  return w;
}

namespace {

double elastic_part(const QField& field, const EnergyModel& model) {
  const GridSpec& g = field.spec;
  const DensityParams prm = model.density_params();
  const double w = g.h * g.h * g.h / 8.0, ih = 1.0 / g.h;
  CompensatedSum e;
  for (int k = 0; k + 1 < g.dims[2]; ++k)
    for (int j = 0; j + 1 < g.dims[1]; ++j)
      for (int i = 0; i + 1 < g.dims[0]; ++i)
        for (int corner = 0; corner < 8; ++corner) {
          const int c[3] = {i + (corner & 1), j + ((corner >> 1) & 1), k + ((corner >> 2) & 1)};
          const long n = g.index(c[0], c[1], c[2]);
          GradQ p;
          for (int a = 0; a < 3; ++a) {
            int lo[3] = {c[0], c[1], c[2]}, hi[3] = {c[0], c[1], c[2]};
            lo[a] = a == 0 ? i : a == 1 ? j : k;
            hi[a] = lo[a] + 1;
            p[a] = (field.values[g.index(hi[0], hi[1], hi[2])] - field.values[g.index(lo[0], lo[1], lo[2])]) * ih;
          }
          e.add(w * density_value(model.density, field.values[n], p, prm));
        }
  return e.value();
}

} // namespace

double elastic_energy(const QField& field, const EnergyModel& model) {
  model.validate();
  return elastic_part(field, model);
}

double penalty_integral(const QField& field, const EnergyModel& model) {
  const std::vector<double> w = node_weights(field.spec);
  CompensatedSum e;
  for (long n = 0; n < field.spec.num_nodes(); ++n) e.add(w[n] * bulk_f_tilde(field.values[n], model.bp));
  return e.value() / model.L_param;
}

double total_energy(const QField& field, const EnergyModel& model) {
  model.validate();
  double e = elastic_part(field, model);
  if (model.include_bulk) e += penalty_integral(field, model);
  return e;
}

QField constant_field(const GridSpec& spec, const QTensor& q) {
  QField f(spec);
  for (auto& v : f.values) v = q;
  return f;
}

QField hedgehog_boundary(const GridSpec& spec, double s_plus, const Vec3& center) {
  QField f(spec);
  for (long n = 0; n < spec.num_nodes(); ++n) {
    if (!f.boundary[n]) continue;
    const Vec3 x = spec.position(n) - center;
    if (x.norm() < 1e-12) throw precondition_error("hedgehog_boundary: boundary node at the hedgehog center");
    f.values[n] = from_director(x.normalized(), s_plus);
  }
  return f;
}

QField twist_bump_boundary(const GridSpec& spec, double s_plus, double amplitude) {
  auto beta = [](double t) {
    const double v = 1.0 - t * t;
    return v * v * v;
  };
  QField f(spec);
  for (long n = 0; n < spec.num_nodes(); ++n) {
    if (!f.boundary[n]) continue;
    const auto c = spec.coords(n);
    double scaled[3];
    for (int a = 0; a < 3; ++a) scaled[a] = 2.0 * c[a] / (spec.dims[a] - 1) - 1.0;
    double t = 0.0;
    for (int a = 0; a < 3; ++a)
      if (c[a] == 0 || c[a] == spec.dims[a] - 1) {
        t = amplitude * beta(scaled[(a + 1) % 3]) * beta(scaled[(a + 2) % 3]);
        break;
      }
    f.values[n] = from_director(Vec3(std::sin(t), 0.0, std::cos(t)), s_plus);
  }
  return f;
}

double w12_distance(const QField& a, const QField& b) {
  if (!(a.spec == b.spec)) throw precondition_error("w12_distance: grid mismatch");
  QField d(a.spec);
  for (long n = 0; n < a.spec.num_nodes(); ++n) d.values[n] = a.values[n] - b.values[n];
  const std::vector<double> w = node_weights(a.spec);
  double acc = 0.0;
  for (long n = 0; n < a.spec.num_nodes(); ++n) acc += w[n] * (d.values[n].squaredNorm() + norm2(fd_gradient(d, n)));
  return std::sqrt(acc);
}

double dist_to_Sstar_L2(const QField& field, double s_plus) {
  const std::vector<double> w = node_weights(field.spec);
  double acc = 0.0;
  for (long n = 0; n < field.spec.num_nodes(); ++n)
    acc += w[n] * (field.values[n] - project_uniaxial(field.values[n], s_plus).q).squaredNorm();
  return std::sqrt(acc);
}

double max_q_norm(const QField& field) {
  double m = 0.0;
  for (const auto& v : field.values) m = std::max(m, v.norm());
  return m;
}

QField qfield_from_directors(const DirectorField& d, double s_plus, const std::vector<std::uint8_t>& boundary) {
  QField f(d.spec);
  for (long n = 0; n < d.spec.num_nodes(); ++n) f.values[n] = from_director(d.values[n].normalized(), s_plus);
  if (!boundary.empty()) f.boundary = boundary;
  return f;
}

DirectorField directors_from_qfield(const QField& q) {
  DirectorField d(q.spec);
  for (long n = 0; n < q.spec.num_nodes(); ++n) d.values[n] = eigendecompose(q.values[n]).eigenvectors.col(0);
  return d;
}

void write_vtk(const QField& field, const std::string& path, double s_plus, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const GridSpec& g = field.spec;
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << '\n';
  out << "ORIGIN " << g.origin(0) << ' ' << g.origin(1) << ' ' << g.origin(2) << '\n';
  out << "SPACING " << g.h << ' ' << g.h << ' ' << g.h << '\n';
  out << "POINT_DATA " << g.num_nodes() << '\n';
  out << "TENSORS Q double\n";
  for (const auto& q : field.values)
    out << q(0, 0) << ' ' << q(0, 1) << ' ' << q(0, 2) << ' ' << q(1, 0) << ' ' << q(1, 1) << ' ' << q(1, 2) << ' '
        << q(2, 0) << ' ' << q(2, 1) << ' ' << q(2, 2) << '\n';
  out << "SCALARS q_norm double 1\nLOOKUP_TABLE default\n";
  for (const auto& q : field.values) out << q.norm() << '\n';
  out << "SCALARS dist_Sstar double 1\nLOOKUP_TABLE default\n";
  for (const auto& q : field.values) out << (q - project_uniaxial(q, s_plus).q).norm() << '\n';
  out << "VECTORS director double\n";
  for (const auto& q : field.values) {
    const Vec3 v = project_uniaxial(q, s_plus).director;
    out << v(0) << ' ' << v(1) << ' ' << v(2) << '\n';
  }
}

void write_node_csv(const QField& field, const std::string& path, const EnergyModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const GridSpec& g = field.spec;
  const DensityParams prm = model.density_params();
  out << std::setprecision(17);
  out << "i,j,k,x,y,z,q_norm,dist_Sstar,elastic_density\n";
  for (long n = 0; n < g.num_nodes(); ++n) {
    const auto c = g.coords(n);
    const Vec3 x = g.position(n);
    const Mat3& q = field.values[n];
    out << c[0] << ',' << c[1] << ',' << c[2] << ',' << x(0) << ',' << x(1) << ',' << x(2) << ',' << q.norm() << ','
        << (q - project_uniaxial(q, model.bp.s_plus).q).norm() << ','
        << density_value(model.density, q, fd_gradient(field, n), prm) << '\n';
  }
}

} // namespace lcq
