FEATURE_COLUMNS = ("x", "y", "z", "temperature", "friction_coefficient")
N_FEATURES = len(FEATURE_COLUMNS)

# Width ladder shared by every architecture: 5 -> 50 -> 100 -> 50 -> 1
LAYER_WIDTHS = (5, 50, 100, 50, 1)

VTK_TETRA = 10
VTK_HEADER = "# vtk DataFile Version 3.0"
VTK_FLOAT_FORMAT = ".17g"

DEFAULT_WEAR_FIELD = "wear"
WEAR_PRED_FIELD = "wear_pred"
MAX_WEAR = 2000.0  # N/m

MANIFEST_MAGIC = "# forgewear-manifest"
MANIFEST_VERSION = 1
MANIFEST_COLUMNS = ("mesh_path", "temperature", "friction_coefficient", "split", "source_id")

CHECKPOINT_FORMAT = "forgewear-checkpoint"
CHECKPOINT_VERSION = 1
CHECKPOINT_FILE = "checkpoint.npz"
CURVE_FILE = "curve.csv"
EVALUATION_FILE = "evaluation.json"
CURVE_COLUMNS = ("epoch", "train_loss", "train_log_mse", "val_mae", "val_mse", "seconds")
