#include "modeswim/fem.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "modeswim/error.hpp"

namespace modeswim::fem {

namespace {

constexpr std::array<std::array<double, 2>, 4> kCorners = {{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}};

// Monomials 1, s, t, s^2, st, t^2, s^3, s^2 t, s t^2, t^3, s^3 t, s t^3 and their derivatives.
struct Monomials {
    ShapeRow p, ps, pt, pss, ptt, pst;
};

Monomials monomials(double s, double t) {
    Monomials m;
    m.p << 1, s, t, s * s, s * t, t * t, s * s * s, s * s * t, s * t * t, t * t * t, s * s * s * t, s * t * t * t;
    m.ps << 0, 1, 0, 2 * s, t, 0, 3 * s * s, 2 * s * t, t * t, 0, 3 * s * s * t, t * t * t;
    m.pt << 0, 0, 1, 0, s, 2 * t, 0, s * s, 2 * s * t, 3 * t * t, s * s * s, 3 * s * t * t;
    m.pss << 0, 0, 0, 2, 0, 0, 6 * s, 2 * t, 0, 0, 6 * s * t, 0;
    m.ptt << 0, 0, 0, 0, 0, 2, 0, 0, 2 * s, 6 * t, 0, 6 * s * t;
    m.pst << 0, 0, 0, 0, 1, 0, 0, 2 * s, 2 * t, 0, 3 * s * s, 3 * t * t;
    return m;
}

// Inverse of the map from monomial coefficients to (w, w_s, w_t) at the corners.
const ElementMatrix& coefficient_inverse() {
    static const ElementMatrix inv = [] {
        ElementMatrix c;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto m = monomials(kCorners[k][0], kCorners[k][1]);
            c.row(static_cast<Eigen::Index>(3 * k)) = m.p;
            c.row(static_cast<Eigen::Index>(3 * k + 1)) = m.ps;
            c.row(static_cast<Eigen::Index>(3 * k + 2)) = m.pt;
        }
        return ElementMatrix(c.inverse());
    }();
    return inv;
}

constexpr std::array<double, 2> kGauss2 = {-0.57735026918962576, 0.57735026918962576};
constexpr std::array<double, 2> kGauss2W = {1.0, 1.0};
constexpr std::array<double, 3> kGauss3 = {-0.77459666924148338, 0.0, 0.77459666924148338};
constexpr std::array<double, 3> kGauss3W = {0.55555555555555556, 0.88888888888888889, 0.55555555555555556};
constexpr std::array<double, 4> kGauss4 = {-0.86113631159405258, -0.33998104358485626, 0.33998104358485626,
                                           0.86113631159405258};
constexpr std::array<double, 4> kGauss4W = {0.34785484513745386, 0.65214515486254614, 0.65214515486254614,
                                            0.34785484513745386};

void check_element(double width, double height, std::size_t e) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
        throw AssemblyError("element " + std::to_string(e) + " has a degenerate Jacobian (width " +
                            std::to_string(width) + ", height " + std::to_string(height) + ")");
    }
}

}  // namespace

std::span<const double> gauss_points(int order) {
    switch (order) {
        case 2: return kGauss2;
        case 3: return kGauss3;
        case 4: return kGauss4;
        default: throw DomainError("unsupported Gauss order " + std::to_string(order));
    }
}

std::span<const double> gauss_weights(int order) {
    switch (order) {
        case 2: return kGauss2W;
        case 3: return kGauss3W;
        case 4: return kGauss4W;
        default: throw DomainError("unsupported Gauss order " + std::to_string(order));
    }
}

void assign_regions(Mesh& mesh, std::span<const Footprint> footprints) {
    for (auto& el : mesh.elements) {
        const auto& a = mesh.nodes[el.nodes[0]];
        const auto& c = mesh.nodes[el.nodes[2]];
        const double cx = 0.5 * (a.x + c.x), cy = 0.5 * (a.y + c.y);
        el.region = 0;
        for (const auto& f : footprints) {
            if (f.contains(cx, cy)) el.region = 1;
        }
    }
}

ShapeEval evaluate_shape(double width, double height, double s, double t) {
    const double hx = 0.5 * width, hy = 0.5 * height;
    const auto m = monomials(s, t);
    ShapeRow scale;
    for (int k = 0; k < 4; ++k) scale.segment<3>(3 * k) << 1.0, hx, hy;
    const ElementMatrix& inv = coefficient_inverse();
    auto shape = [&](const ShapeRow& row) -> ShapeRow { return (row * inv).cwiseProduct(scale); };
    ShapeEval e;
    e.n = shape(m.p);
    e.dx = shape(m.ps) / hx;
    e.dy = shape(m.pt) / hy;
    e.dxx = shape(m.pss) / (hx * hx);
    e.dyy = shape(m.ptt) / (hy * hy);
    e.dxy = shape(m.pst) / (hx * hy);
    return e;
}

ElementMatrix element_stiffness(double width, double height, const laminate::PlateBendingStiffness& d) {
    check_element(width, height, 0);
    Eigen::Matrix3d c;
    c << d.d11, d.d12, 0.0, d.d12, d.d22, 0.0, 0.0, 0.0, d.d66;
    const double jac = 0.25 * width * height;
    ElementMatrix k = ElementMatrix::Zero();
    for (std::size_t i = 0; i < kGauss4.size(); ++i) {
        for (std::size_t j = 0; j < kGauss4.size(); ++j) {
            const auto e = evaluate_shape(width, height, kGauss4[i], kGauss4[j]);
            Eigen::Matrix<double, 3, 12> b;
            b.row(0) = e.dxx;
            b.row(1) = e.dyy;
            b.row(2) = 2.0 * e.dxy;
            k.noalias() += (kGauss4W[i] * kGauss4W[j] * jac) * b.transpose() * c * b;
        }
    }
    return 0.5 * (k + k.transpose());
}

ElementMatrix element_mass(double width, double height, double mass_per_area) {
    check_element(width, height, 0);
    const double jac = 0.25 * width * height;
    ElementMatrix m = ElementMatrix::Zero();
    for (std::size_t i = 0; i < kGauss4.size(); ++i) {
        for (std::size_t j = 0; j < kGauss4.size(); ++j) {
            const auto e = evaluate_shape(width, height, kGauss4[i], kGauss4[j]);
            m.noalias() += (kGauss4W[i] * kGauss4W[j] * jac * mass_per_area) * e.n.transpose() * e.n;
        }
    }
    return 0.5 * (m + m.transpose());
}

std::array<std::size_t, 12> element_dofs(const Mesh& mesh, std::size_t e) {
    std::array<std::size_t, 12> dofs{};
    const auto& n = mesh.elements[e].nodes;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t d = 0; d < kDofsPerNode; ++d) dofs[3 * k + d] = Mesh::dof(n[k], d);
    }
    return dofs;
}

Eigen::VectorXd SystemMatrices::expand(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full_dof_count));
    for (std::size_t k = 0; k < dofs.size(); ++k) full[static_cast<Eigen::Index>(dofs[k])] = reduced[static_cast<Eigen::Index>(k)];
    return full;
}

SystemMatrices assemble(const Mesh& mesh, std::span<const laminate::LaminateSection> sections) {
    if (sections.empty()) throw AssemblyError("assembly needs at least one section");
    std::vector<laminate::PlateBendingStiffness> stiffness;
    for (const auto& s : sections) stiffness.push_back(laminate::plate_bending_stiffness(s));

    using Key = std::tuple<double, double, int>;
    std::map<Key, std::pair<ElementMatrix, ElementMatrix>> cache;

    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(mesh.elements.size() * 144);
    mt.reserve(mesh.elements.size() * 144);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const int region = mesh.elements[e].region;
        if (region < 0 || static_cast<std::size_t>(region) >= sections.size()) {
            throw AssemblyError("element " + std::to_string(e) + " refers to missing section " + std::to_string(region));
        }
        const double w = mesh.element_width(e), h = mesh.element_height(e);
        check_element(w, h, e);
        const Key key{w, h, region};
        auto it = cache.find(key);
        if (it == cache.end()) {
            const auto r = static_cast<std::size_t>(region);
            it = cache.emplace(key, std::pair{element_stiffness(w, h, stiffness[r]),
                                              element_mass(w, h, sections[r].mass_per_area)})
                     .first;
        }
        const auto& [ke, me] = it->second;
        const auto dofs = element_dofs(mesh, e);
        for (int i = 0; i < 12; ++i) {
            for (int j = 0; j < 12; ++j) {
                const auto gi = static_cast<int>(dofs[static_cast<std::size_t>(i)]);
                const auto gj = static_cast<int>(dofs[static_cast<std::size_t>(j)]);
                kt.emplace_back(gi, gj, ke(i, j));
                mt.emplace_back(gi, gj, me(i, j));
            }
        }
    }

    SystemMatrices out;
    const auto n = static_cast<Eigen::Index>(mesh.dof_count());
    out.full_dof_count = mesh.dof_count();
    out.stiffness.resize(n, n);
    out.mass.resize(n, n);
    out.stiffness.setFromTriplets(kt.begin(), kt.end());
    out.mass.setFromTriplets(mt.begin(), mt.end());
    out.dofs.resize(mesh.dof_count());
    for (std::size_t i = 0; i < out.dofs.size(); ++i) out.dofs[i] = i;
    return out;
}

SystemMatrices assemble(const Mesh& mesh, const laminate::LaminateSection& section) {
    for (const auto& el : mesh.elements) {
        if (el.region != 0) throw AssemblyError("single-section assembly on a mesh with several regions");
    }
    return assemble(mesh, std::span<const laminate::LaminateSection>(&section, 1));
}

SystemMatrices apply_boundary(const SystemMatrices& matrices, const Mesh& mesh, const BoundaryCondition& bc) {
    if (bc.kind == BoundaryCondition::Kind::free) {
        SystemMatrices out = matrices;
        out.bc = bc;
        return out;
    }
    if (matrices.full_dof_count != mesh.dof_count() || matrices.size() != matrices.full_dof_count) {
        throw ConfigError("boundary conditions must be applied to unconstrained matrices of the same mesh");
    }

    std::vector<char> fixed(mesh.dof_count(), 0);
    if (bc.kind == BoundaryCondition::Kind::simply_supported) {
        for (auto node : mesh.boundary_nodes()) fixed[Mesh::dof(node, Dof::w)] = 1;
    } else {
        if (mesh.geometry.planform != Planform::rectangle) {
            throw ConfigError("clamped edge specs are only defined for rectangular planforms");
        }
        if (bc.edges.empty()) throw ConfigError("clamped boundary needs at least one edge");
        const double a = mesh.geometry.a, b = mesh.geometry.b;
        const double tol = 1e-9 * std::max(a, b);
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            const auto& p = mesh.nodes[i];
            for (auto edge : bc.edges) {
                const bool on = (edge == Edge::left && std::abs(p.x) <= tol) ||
                                (edge == Edge::right && std::abs(p.x - a) <= tol) ||
                                (edge == Edge::bottom && std::abs(p.y) <= tol) ||
                                (edge == Edge::top && std::abs(p.y - b) <= tol);
                if (on) {
                    for (std::size_t d = 0; d < kDofsPerNode; ++d) fixed[Mesh::dof(i, d)] = 1;
                }
            }
        }
    }

    SystemMatrices out;
    out.bc = bc;
    out.full_dof_count = matrices.full_dof_count;
    std::vector<int> reduced(mesh.dof_count(), -1);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (!fixed[i]) {
            reduced[i] = static_cast<int>(out.dofs.size());
            out.dofs.push_back(i);
        }
    }
    auto restrict = [&](const SparseMatrix& a) {
        std::vector<Eigen::Triplet<double>> t;
        for (int col = 0; col < a.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
                const int r = reduced[static_cast<std::size_t>(it.row())];
                const int c = reduced[static_cast<std::size_t>(it.col())];
                if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
            }
        }
        const auto n = static_cast<Eigen::Index>(out.dofs.size());
        SparseMatrix m(n, n);
        m.setFromTriplets(t.begin(), t.end());
        return m;
    };
    out.stiffness = restrict(matrices.stiffness);
    out.mass = restrict(matrices.mass);
    return out;
}

Eigen::VectorXd rigid_motion(const Mesh& mesh, double c0, double c1, double c2) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.dof_count()));
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const auto& p = mesh.nodes[i];
        u[static_cast<Eigen::Index>(Mesh::dof(i, Dof::w))] = c0 + c1 * p.x + c2 * p.y;
        u[static_cast<Eigen::Index>(Mesh::dof(i, Dof::slope_x))] = c1;
        u[static_cast<Eigen::Index>(Mesh::dof(i, Dof::slope_y))] = c2;
    }
    return u;
}

}  // namespace modeswim::fem
