#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curvlab {

/// Canonical classes: potential-weighted (f), nongradient (X) and classical (f ignored).
enum class ClassId {
  SFf, LSf, LSEf, PRf, Ef, HCf, HCfLambda, Yf,
  SFx, LSx, LSEx, PRx, Ex, HCx, Yx,
  SF, LS, LSE, PR, E, HC, Y,
};

enum class ClassFamily { Potential, VectorField, Classical };

inline constexpr std::array<ClassId, 22> kAllClasses = {
    ClassId::SFf, ClassId::LSf, ClassId::LSEf, ClassId::PRf, ClassId::Ef, ClassId::HCf, ClassId::HCfLambda,
    ClassId::Yf,  ClassId::SFx, ClassId::LSx,  ClassId::LSEx, ClassId::PRx, ClassId::Ex, ClassId::HCx,
    ClassId::Yx,  ClassId::SF,  ClassId::LS,   ClassId::LSE, ClassId::PR,  ClassId::E,  ClassId::HC,
    ClassId::Y};

std::string_view class_name(ClassId c);
std::optional<ClassId> parse_class(std::string_view name);
ClassFamily class_family(ClassId c);
std::vector<ClassId> classes_of(ClassFamily family);

/// Inclusion arrows (smaller, larger) of the class lattice inside one family.
std::vector<std::pair<ClassId, ClassId>> lattice_arrows(ClassFamily family);

/// The classical class an f-class reduces to when the potential is constant.
ClassId classical_counterpart(ClassId c);

/// True when `members` is closed under every inclusion arrow.
bool upward_closed(const std::vector<ClassId>& members, std::vector<std::pair<ClassId, ClassId>>* violations = nullptr);

}  // namespace curvlab
