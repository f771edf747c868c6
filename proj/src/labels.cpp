#include "hsx/labels.hpp"

namespace hsx {

const std::map<int, std::string>& subregion_names() {
  static const std::map<int, std::string> names = {
      {101, "left-anterior-superior"},  {102, "left-anterior-inferior"},
      {103, "left-tuberal-superior"},   {104, "left-tuberal-inferior"},
      {105, "left-posterior"},          {106, "right-anterior-superior"},
      {107, "right-anterior-inferior"}, {108, "right-tuberal-superior"},
      {109, "right-tuberal-inferior"},  {110, "right-posterior"},
  };
  return names;
}

const std::map<int, std::string>& band_names() {
  static const std::map<int, std::string> names = [] {
    std::map<int, std::string> m = subregion_names();
    m[111] = "left-fornix";
    m[112] = "right-fornix";
    return m;
  }();
  return names;
}

std::vector<int> subregion_id_list() {
  std::vector<int> v;
  for (int id = 101; id <= 110; ++id) v.push_back(id);
  return v;
}

std::vector<int> band_id_list() {
  std::vector<int> v;
  for (int id = 101; id <= 112; ++id) v.push_back(id);
  return v;
}

const std::vector<RegionGroup>& region_groups() {
  static const std::vector<RegionGroup> groups = {
      {"anterior", {101, 102, 106, 107}},
      {"tuberal", {103, 104, 108, 109}},
      {"posterior", {105, 110}},
      {"whole", {101, 102, 103, 104, 105, 106, 107, 108, 109, 110}},
  };
  return groups;
}

}  // namespace hsx
