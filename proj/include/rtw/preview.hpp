#pragma once

#include <array>
#include <filesystem>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rtw/annotation.hpp"
#include "rtw/image_io.hpp"
#include "rtw/raster.hpp"

namespace rtw::preview {

inline constexpr std::array<float, 3> kParagraphColor{1.0f, 0.15f, 0.1f};
inline constexpr std::array<float, 3> kWordColor{0.1f, 0.9f, 0.2f};
inline constexpr float kMaskOpacity = 0.3f;

// Colour for mask id `id` (id >= 1), fixed per id.
std::array<float, 3> tint_for(int id);

// Pixels whose center lies within width/2 of the polygon outline.
std::vector<std::uint8_t> outline_mask(std::span<const Point2> poly,
                                       double width, std::uint32_t w,
                                       std::uint32_t h);

// Mask tint at 30% first, then word outlines (1 px), then paragraph outlines
// (2 px) on top.
Raster render_overlay(const Raster& image, const annot::AnnotationRecord& record,
                      const LabelImage* mask);

// File wrapper; throws MissingFile for absent inputs.
void preview(const std::filesystem::path& image,
             const std::filesystem::path& annotation,
             const std::optional<std::filesystem::path>& mask,
             const std::filesystem::path& out);

}  // namespace rtw::preview
