#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c0ipg/types.hpp"

namespace c0ipg {

enum class Domain {
    kSlit,        ///< [0,1]^2 cut along [0.5,1] x {0.5}
    kLShape,      ///< [-1,1]^2 minus [0,1] x [-1,0]
    kUnitSquare,  ///< [0,1]^2
};

Domain parse_domain(std::string_view name);
std::string_view to_string(Domain domain);

enum class FaceKind { kInterior, kBoundary };

/// An edge of the triangulation.
///
/// For interior faces the normal points from `minus` to `plus`; for boundary
/// faces it is the outward normal of the domain and `plus` is -1.
struct Face {
    std::array<int, 2> vertices{};
    FaceKind kind = FaceKind::kBoundary;
    int minus = -1;
    int plus = -1;
    Point normal;
    Real length = 0.0;

    [[nodiscard]] bool is_interior() const { return kind == FaceKind::kInterior; }
};

/// A triangle stored counterclockwise with v[0] the newest vertex; its
/// refinement edge is (v[1], v[2]).
struct Triangle {
    std::array<int, 3> v{};
    int generation = 0;
    int parent = -1;  ///< index of the triangle in the previous mesh it descends from
};

/// Conforming triangulation with face topology. Immutable after construction.
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles);

    [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
    [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_triangles() const { return static_cast<int>(triangles_.size()); }
    [[nodiscard]] int num_faces() const { return static_cast<int>(faces_.size()); }

    [[nodiscard]] const Point& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const Triangle& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    [[nodiscard]] const Face& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }

    /// Face ids of triangle t; local edge k joins v[k] and v[(k+1) % 3].
    [[nodiscard]] const std::array<int, 3>& triangle_faces(int t) const
    {
        return triangle_faces_[static_cast<std::size_t>(t)];
    }

    [[nodiscard]] std::array<Point, 3> corners(int t) const;
    [[nodiscard]] Real area(int t) const;
    /// Longest edge length.
    [[nodiscard]] Real diameter(int t) const;
    /// Smallest interior angle in radians.
    [[nodiscard]] Real min_angle(int t) const;
    [[nodiscard]] Real max_diameter() const;
    [[nodiscard]] Real total_area() const;
    [[nodiscard]] Real global_min_angle() const;

private:
    void build_faces();

    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Face> faces_;
    std::vector<std::array<int, 3>> triangle_faces_;
};

/// Structured mesh of congruent right triangles with diameter h0.
/// Throws SizingError when h0 does not tile the domain exactly.
Mesh make_uniform(Domain domain, Real h0);

/// Newest-vertex bisection of the marked triangles plus conformity closure.
Mesh refine(const Mesh& mesh, std::span<const int> marked);

/// Bisects every triangle once (plus closure).
Mesh refine_all(const Mesh& mesh);

struct FaceQuadraturePoint {
    Point point;
    Real weight = 0.0;
};

/// n-point Gauss-Legendre rule on the segment [a, b]; weights sum to |b - a|.
std::vector<FaceQuadraturePoint> face_quadrature_points(Point a, Point b, int n);
std::vector<FaceQuadraturePoint> face_quadrature_points(const Mesh& mesh, const Face& face, int n);

/// ASCII snapshot: "nv nt", nv lines "x y", nt lines "i j k" (0-based).
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);

}  // namespace c0ipg
