"""vertegrow: seeded cellular-automaton segmentation for volumetric scans."""

from .engine import (ALGORITHMS, EngineConfig, SegmentationResult, mask,
                     offsets_for, segment, strength, sweep_bgrowth,
                     sweep_growcut, warm_up)
from .errors import DataError, MissingSeedsError, VertegrowError
from .experiment import (ReportRow, SlopeSeries, SweepPoint, emit_report,
                         run_sweep, segment_session, select_distance, slope)
from .metrics import MetricReport, dice, hausdorff, jaccard, report
from .phantom import PhantomSpec, auto_seed, default_suite, generate
from .seeds import (AnnotationSession, Stroke, annotated_slices,
                    annotation_time, load_session, rasterize, save_session,
                    subsample_slices)
from .volume import (CropRegion, VoxelIndex, Volume, crop_to_seeds,
                     load_labels, load_volume, narrow_labels, save_labels,
                     save_volume, uncrop_labels)

__version__ = "0.1.0"
