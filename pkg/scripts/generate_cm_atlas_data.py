import sys
from pathlib import Path
import logging
from typing import Dict, Optional

import pandas as pd

import settings
from atlas import records_frame, tabulate_family, write_frame_csv

logger = logging.getLogger(__name__)

FAMILIES = ("cyclic", "abelian-products", "dihedral")


class AtlasValidationError(Exception):
    """Custom exception for atlas validation errors"""
    pass


def setup_directories(root_dir: Optional[Path] = None) -> Path:
    """
    Finds the repository root and sets up the next versioned output directory.

    Returns:
        Path: Path to the new version directory

    Raises:
        OSError: If directory creation fails
    """
    try:
        if root_dir is None:
            if getattr(sys, 'frozen', False):
                root_dir = Path(sys.executable).parent.parent
            else:
                root_dir = settings.ROOT_DIR
        output_dir = Path(root_dir) / 'output'
        output_dir.mkdir(exist_ok=True)

        existing_versions = [v for v in output_dir.glob('cm_atlas_v*') if v.is_dir()]
        next_version = 1

        if existing_versions:
            version_numbers = [int(v.name.split('_v')[-1]) for v in existing_versions]
            next_version = max(version_numbers) + 1

        version_dir = output_dir / f'cm_atlas_v{next_version}'
        version_dir.mkdir(exist_ok=True)

        logger.info(f"Output directory: {output_dir}")
        logger.info(f"Version directory: {version_dir}")

        return version_dir

    except OSError as e:
        logger.error(f"Failed to create directory structure: {str(e)}")
        raise


def generate_family(family: str, bound: Optional[int] = None, workers: int = 1) -> pd.DataFrame:
    """
    Tabulate one family over every admissible (H, c), as a CSV-shaped frame.
    """
    bound = settings.EXHAUSTIVE_ORDER_BOUND if bound is None else bound
    records = tabulate_family(family, bound, all_subfields=True, workers=workers)
    return records_frame(records)


def validate_data(df: pd.DataFrame) -> None:
    """
    Every record must pass the theorem and factorization cells.
    """
    if df.empty:
        raise AtlasValidationError("Atlas has no records")

    errors = df[df['error'] != '']
    if not errors.empty:
        first = errors.iloc[0]
        raise AtlasValidationError(
            f"{len(errors)} records raised errors, first {first['group']} phi={first['phi']}: {first['error']}")

    for column in ('theorem', 'factorization'):
        bad = df[df[column] != 'true']
        if not bad.empty:
            raise AtlasValidationError(f"{column} failed for {len(bad)} records, first {bad.iloc[0]['group']}")

    ranks = df['mt_rank'].astype(int)
    g = df['g'].astype(int)
    if (ranks < 2).any() or (ranks > g + 1).any():
        raise AtlasValidationError("Mumford-Tate rank outside [2, g + 1]")


def summarize(df: pd.DataFrame) -> pd.DataFrame:
    """Records, degenerate and imprimitive counts per datum."""
    view = df.assign(
        degenerate=df['degenerate'] == 'true',
        imprimitive=df['primitive'] == 'false',
    )
    return (
        view.groupby('group', sort=True)
        .agg(records=('phi', 'size'), degenerate=('degenerate', 'sum'), imprimitive=('imprimitive', 'sum'))
        .reset_index()
    )


def main(root_dir: Optional[Path] = None, bound: Optional[int] = None, workers: int = 1) -> Dict[str, Path]:
    """
    Main function to orchestrate the atlas generation process.
    """
    logging.basicConfig(level=logging.INFO, format=settings.LOG_FORMAT)
    written = {}
    try:
        logger.info("Starting atlas generation...")
        output_dir = setup_directories(root_dir)

        for family in FAMILIES:
            logger.info(f"Tabulating family {family}...")
            df = generate_family(family, bound=bound, workers=workers)
            validate_data(df)

            path = output_dir / f'cm_atlas__{family.replace("-", "_")}.csv'
            write_frame_csv(df, path)
            written[family] = path

            summary = summarize(df)
            logger.info(f"{family}: {len(df)} records over {len(summary)} data, "
                        f"{int(summary['degenerate'].sum())} degenerate")

        logger.info("Atlas generation completed successfully!")
        logger.info("Created/Modified files during execution:")
        for file in sorted(output_dir.glob('*.csv')):
            logger.info(f"- {file.name}")
        return written

    except Exception as e:
        logger.error(f"Error occurred during execution: {str(e)}")
        raise


if __name__ == "__main__":
    main()
