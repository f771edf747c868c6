#pragma once

#include <map>
#include <string>
#include <vector>

namespace hsx {

// Reserved id band for the manually delineated structures. Tissue classes
// from automated clustering stay in 1..k, so merging never collides.
namespace label_ids {

constexpr int kBandStart = 101;

constexpr int kLeftAnteriorSuperior = 101;
constexpr int kLeftAnteriorInferior = 102;
constexpr int kLeftTuberalSuperior = 103;
constexpr int kLeftTuberalInferior = 104;
constexpr int kLeftPosterior = 105;
constexpr int kRightAnteriorSuperior = 106;
constexpr int kRightAnteriorInferior = 107;
constexpr int kRightTuberalSuperior = 108;
constexpr int kRightTuberalInferior = 109;
constexpr int kRightPosterior = 110;
constexpr int kLeftFornix = 111;
constexpr int kRightFornix = 112;

constexpr int kSubregionCount = 10;

inline bool is_subregion(int id) { return id >= 101 && id <= 110; }
inline bool is_fornix(int id) { return id == 111 || id == 112; }
inline bool in_band(int id) { return id >= 101 && id <= 112; }

// Left<->right partner id; ids outside the band map to themselves.
inline int contralateral(int id) {
  if (id >= 101 && id <= 105) return id + 5;
  if (id >= 106 && id <= 110) return id - 5;
  if (id == 111) return 112;
  if (id == 112) return 111;
  return id;
}

// Network class channel for a band id: 0 background, 1..10 subregions,
// 11..12 fornices.
inline int channel_of(int id) { return in_band(id) ? id - 100 : 0; }
inline int id_of_channel(int ch) { return ch == 0 ? 0 : ch + 100; }

}  // namespace label_ids

const std::map<int, std::string>& subregion_names();       // 10 reported regions
const std::map<int, std::string>& band_names();            // subregions + fornices
std::vector<int> subregion_id_list();                      // 101..110
std::vector<int> band_id_list();                           // 101..112

// Paper-style 3-group reporting: anterior / tuberal / posterior, both sides
// pooled, plus the whole structure.
struct RegionGroup {
  std::string name;
  std::vector<int> ids;
};
const std::vector<RegionGroup>& region_groups();

}  // namespace hsx
