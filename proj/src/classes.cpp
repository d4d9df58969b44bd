#include "curvlab/classes.hpp"

#include <algorithm>
#include <stdexcept>

namespace curvlab {

namespace {

constexpr std::array<std::string_view, 22> kNames = {"SFf", "LSf", "LSEf", "PRf", "Ef", "HCf", "HCfLambda", "Yf",
                                                     "SFx", "LSx", "LSEx", "PRx", "Ex", "HCx", "Yx",
                                                     "SF",  "LS",  "LSE",  "PR",  "E",  "HC",  "Y"};

}  // namespace

std::string_view class_name(ClassId c) { return kNames[static_cast<int>(c)]; }

std::optional<ClassId> parse_class(std::string_view name) {
  for (std::size_t k = 0; k < kNames.size(); ++k)
    if (kNames[k] == name) return static_cast<ClassId>(k);
  return std::nullopt;
}

ClassFamily class_family(ClassId c) {
  const int k = static_cast<int>(c);
  if (k <= static_cast<int>(ClassId::Yf)) return ClassFamily::Potential;
  if (k <= static_cast<int>(ClassId::Yx)) return ClassFamily::VectorField;
  return ClassFamily::Classical;
}

std::vector<ClassId> classes_of(ClassFamily family) {
  std::vector<ClassId> out;
  for (ClassId c : kAllClasses)
    if (class_family(c) == family) out.push_back(c);
  return out;
}

std::vector<std::pair<ClassId, ClassId>> lattice_arrows(ClassFamily family) {
  using C = ClassId;
  switch (family) {
    case ClassFamily::Potential:
      return {{C::SFf, C::LSEf}, {C::LSEf, C::Ef},       {C::Ef, C::HCfLambda}, {C::HCfLambda, C::HCf},
              {C::HCf, C::Yf},   {C::SFf, C::LSf},       {C::LSEf, C::LSf},     {C::LSf, C::PRf},
              {C::Ef, C::PRf},   {C::PRf, C::HCfLambda}};
    case ClassFamily::VectorField:
      return {{C::SFx, C::LSEx}, {C::LSEx, C::Ex}, {C::Ex, C::HCx},  {C::HCx, C::Yx}, {C::SFx, C::LSx},
              {C::LSEx, C::LSx}, {C::LSx, C::PRx}, {C::Ex, C::PRx},  {C::PRx, C::HCx}};
    case ClassFamily::Classical:
      return {{C::SF, C::LSE}, {C::LSE, C::E}, {C::E, C::HC},  {C::HC, C::Y},  {C::SF, C::LS},
              {C::LSE, C::LS}, {C::LS, C::PR}, {C::E, C::PR},  {C::PR, C::HC}};
  }
  return {};
}

ClassId classical_counterpart(ClassId c) {
  using C = ClassId;
  switch (c) {
    case C::SFf: return C::SF;
    case C::LSf: return C::LS;
    case C::LSEf: return C::LSE;
    case C::PRf: return C::PR;
    case C::Ef: return C::E;
    case C::HCf: return C::HC;
    // Harmonic curvature forces constant scalar curvature, so the lambda refinement is vacuous.
    case C::HCfLambda: return C::HC;
    case C::Yf: return C::Y;
    default: throw std::invalid_argument("classical counterpart is defined for f-classes only");
  }
}

bool upward_closed(const std::vector<ClassId>& members, std::vector<std::pair<ClassId, ClassId>>* violations) {
  bool ok = true;
  auto has = [&](ClassId c) { return std::find(members.begin(), members.end(), c) != members.end(); };
  for (ClassFamily fam : {ClassFamily::Potential, ClassFamily::VectorField, ClassFamily::Classical})
    for (const auto& [lo, hi] : lattice_arrows(fam))
      if (has(lo) && !has(hi)) {
        ok = false;
        if (violations) violations->push_back({lo, hi});
      }
  return ok;
}

}  // namespace curvlab
