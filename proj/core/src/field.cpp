#include "nanoplate/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nanoplate/error.hpp"

namespace nanoplate {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double Partials::gradient_norm_sq(int k) const {
  double sum = 0.0;
  for (int ny = 0; ny <= k; ++ny) {
    const double d = (*this)(k - ny, ny);
    sum += binomial(k, ny) * d * d;
  }
  return sum;
}

Partials ConstantField::partials(Point, int order) const {
  Partials out(order);
  out(0, 0) = c_;
  return out;
}

std::string ConstantField::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << c_;
  return os.str();
}

std::string GridField::describe() const {
  return "grid " + std::to_string(nx_) + "x" + std::to_string(ny_);
}

ExpressionField::ExpressionField(Expression expr) {
  table_[0][0] = std::move(expr);
  for (int total = 1; total <= kOrder; ++total) {
    for (int ny = 0; ny <= total; ++ny) {
      const int nx = total - ny;
      table_[nx][ny] = nx > 0 ? table_[nx - 1][ny].derivative('x') : table_[nx][ny - 1].derivative('y');
    }
  }
  constant_ = table_[0][0].is_constant();
}

std::shared_ptr<ExpressionField> ExpressionField::parse(const std::string& text) {
  return std::make_shared<ExpressionField>(Expression::parse(text));
}

Partials ExpressionField::partials(Point p, int order) const {
  NANOPLATE_THROW_IF(order > kOrder, ErrorCode::OrderTooHigh,
                     "expression fields provide derivatives up to order 3");
  Partials out(order);
  for (int total = 0; total <= order; ++total) {
    for (int ny = 0; ny <= total; ++ny) out(total - ny, ny) = table_[total - ny][ny](p);
  }
  return out;
}

GridField::GridField(int nx, int ny, double Lx, double Ly, std::vector<double> values)
    : nx_(nx), ny_(ny), Lx_(Lx), Ly_(Ly), values_(std::move(values)) {
  NANOPLATE_THROW_IF(nx < 2 || ny < 2, ErrorCode::InvalidConfig, "grid field needs at least 2x2 nodes");
  NANOPLATE_THROW_IF(!(Lx > 0.0 && Ly > 0.0), ErrorCode::InvalidConfig, "grid field extents must be positive");
  NANOPLATE_THROW_IF(values_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny),
                     ErrorCode::InvalidConfig, "grid field value count does not match nx*ny");
}

std::shared_ptr<GridField> GridField::load(const std::string& path) {
  std::ifstream in(path);
  NANOPLATE_THROW_IF(!in, ErrorCode::Io, "cannot open grid file " + path);
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  NANOPLATE_THROW_IF(!(in >> nx >> ny >> Lx >> Ly), ErrorCode::InvalidConfig, "bad grid header in " + path);
  NANOPLATE_THROW_IF(nx < 2 || ny < 2, ErrorCode::InvalidConfig, "grid dimensions too small in " + path);
  std::vector<double> values(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (auto& v : values) {
    NANOPLATE_THROW_IF(!(in >> v), ErrorCode::InvalidConfig, "truncated grid data in " + path);
  }
  return std::make_shared<GridField>(nx, ny, Lx, Ly, std::move(values));
}

namespace {
struct Cell {
  int i, j;
  double u, v;  // local coordinates in [0,1]
  double hx, hy;
};

Cell locate(double x, double y, int nx, int ny, double Lx, double Ly) {
  const double hx = Lx / (nx - 1);
  const double hy = Ly / (ny - 1);
  const double fx = std::clamp(x / hx, 0.0, static_cast<double>(nx - 1));
  const double fy = std::clamp(y / hy, 0.0, static_cast<double>(ny - 1));
  const int i = std::min(static_cast<int>(fx), nx - 2);
  const int j = std::min(static_cast<int>(fy), ny - 2);
  return {i, j, fx - i, fy - j, hx, hy};
}
}  // namespace

double GridField::value(Point p) const {
  const Cell c = locate(p.x, p.y, nx_, ny_, Lx_, Ly_);
  auto at = [&](int i, int j) { return values_[static_cast<std::size_t>(j) * nx_ + i]; };
  return (1 - c.u) * (1 - c.v) * at(c.i, c.j) + c.u * (1 - c.v) * at(c.i + 1, c.j) +
         (1 - c.u) * c.v * at(c.i, c.j + 1) + c.u * c.v * at(c.i + 1, c.j + 1);
}

Partials GridField::partials(Point p, int order) const {
  NANOPLATE_THROW_IF(order > 1, ErrorCode::OrderTooHigh, "grid fields provide first derivatives only");
  Partials out(order);
  out(0, 0) = value(p);
  if (order >= 1) {
    const Cell c = locate(p.x, p.y, nx_, ny_, Lx_, Ly_);
    auto at = [&](int i, int j) { return values_[static_cast<std::size_t>(j) * nx_ + i]; };
    out(1, 0) = ((1 - c.v) * (at(c.i + 1, c.j) - at(c.i, c.j)) + c.v * (at(c.i + 1, c.j + 1) - at(c.i, c.j + 1))) / c.hx;
    out(0, 1) = ((1 - c.u) * (at(c.i, c.j + 1) - at(c.i, c.j)) + c.u * (at(c.i + 1, c.j + 1) - at(c.i + 1, c.j))) / c.hy;
  }
  return out;
}

LinearCombinationField::LinearCombinationField(double a, FieldPtr f, double b, FieldPtr g)
    : a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {}

Partials LinearCombinationField::partials(Point p, int order) const {
  const Partials pf = f_->partials(p, order);
  const Partials pg = g_->partials(p, order);
  Partials out(order);
  for (int total = 0; total <= order; ++total) {
    for (int ny = 0; ny <= total; ++ny) out(total - ny, ny) = a_ * pf(total - ny, ny) + b_ * pg(total - ny, ny);
  }
  return out;
}

int LinearCombinationField::max_order() const { return std::min(f_->max_order(), g_->max_order()); }

FieldPtr make_field(const std::string& text) {
  auto expr = ExpressionField::parse(text);
  if (expr->is_constant()) return std::make_shared<ConstantField>(expr->value({}));
  return expr;
}

}  // namespace nanoplate
