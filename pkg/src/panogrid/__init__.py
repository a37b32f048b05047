"""panogrid: spherical-panorama geometry, tangent-plane grids, and metrics."""

from .errors import (
    BackendUnavailable,
    ChecksumError,
    CountError,
    CoverageError,
    DimensionError,
    DomainError,
    EmptyInput,
    FormatError,
    HemisphereError,
    InsufficientSamples,
    IoError,
    LayoutError,
    PanogridError,
    RangeError,
)
from .sphere import (
    DistortionTriple,
    PlaneCoord,
    SphericalCoord,
    TangentPlaneSpec,
    angular_distance,
    coverage_counts,
    distortion,
    erp_lonlat_of_pixels,
    erp_pixels_of_lonlat,
    gnomonic_forward,
    gnomonic_forward_arrays,
    gnomonic_inverse,
    gnomonic_inverse_arrays,
    load_layout,
    plane_layout_18,
    ring,
    save_layout,
    wrap_lon,
)
from .raster import (
    CubemapFaces,
    ErpImage,
    TangentSet,
    cubemap_to_erp,
    erp_to_cubemap,
    extract_all,
    extract_tangent,
    psnr,
    read_erp_png,
    read_png,
    reproject_blend,
    sample_bilinear,
    write_png,
)
from .grid import (
    GridLayout,
    assemble,
    grid_from_dict,
    grid_to_dict,
    load_full_layout,
    make_grid_layout,
    save_full_layout,
    split,
)
from .tensorops import (
    PatchGrid,
    circular_pad,
    crop_pad,
    flow_interpolate,
    normal_noise,
    perturb,
    rotate_lon,
    tile_patches,
    untile_patches,
)
from .metrics import (
    CubemapFeatures,
    FeatureSet,
    GaussianStats,
    LogitSet,
    MetricReport,
    confidence_bound,
    discontinuity_score,
    fid,
    frechet_distance,
    gaussian_stats,
    inception_score,
    omnifid,
    tangent_fid,
    tangent_is,
)
from .features import (
    OnnxBackend,
    PrecomputedBackend,
    extract_features,
    load_features,
    load_logits,
    load_tensor,
    read_manifest,
    save_features,
    save_tensor,
    write_manifest,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
