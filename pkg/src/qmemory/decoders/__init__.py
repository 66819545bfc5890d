from .cluster import (ClusterBox, ClusterDecoder, DecoderCapacity, DecoderResult,
                      InvalidSyndrome, box_neutral, cluster_decode, decoder_for)
from .toric_fast import ToricFastDecoder, toric_seam_bits

__all__ = ["ClusterBox", "ClusterDecoder", "DecoderCapacity", "DecoderResult",
           "InvalidSyndrome", "box_neutral", "cluster_decode", "decoder_for",
           "ToricFastDecoder", "toric_seam_bits"]
