import csv
import json
from asyncio import Semaphore, gather, new_event_loop
from concurrent.futures import Executor, ProcessPoolExecutor
from io import StringIO
from logging import getLogger
from pathlib import Path
from typing import List, Optional, Sequence

import aiofiles

from .config import ExperimentConfig
from .errors import ArgumentError
from .experiments.runners import ExperimentResult, Table, run_experiment
from .internal.file import FieldFile

__all__ = ("Laboratory",)

logger = getLogger("auxma.lab")


def _csv(header: Sequence[str], rows) -> str:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


class Laboratory:
    def __init__(self, field_format: str = "binary") -> None:
        """Runs experiments and writes their artifacts.

        Each run writes ``report.json``, ``profile.csv`` when the experiment
        produced a sublevel profile, one CSV per extra table and one field
        file per dumped field, all inside the config's output directory.

        :param field_format: ``binary`` or ``csv`` for field dumps.
        :type field_format: str
        """

        self._loop = new_event_loop()
        self.field_format = field_format

    async def _write_text(self, path: Path, text: str) -> None:
        async with aiofiles.open(path, "w", encoding="utf-8", newline="") as file:
            await file.write(text)

    async def _write_bytes(self, path: Path, data: bytes) -> None:
        async with aiofiles.open(path, "wb") as file:
            await file.write(data)

    async def write(self, result: ExperimentResult, directory: Path) -> List[Path]:
        """Write every artifact of ``result`` into ``directory``."""

        directory.mkdir(parents=True, exist_ok=True)
        writes = {directory / "report.json": json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n"}
        if result.profile is not None:
            writes[directory / "profile.csv"] = _csv(("s", "phi", "A"), result.profile.rows())

        table: Table
        for name, table in result.tables.items():
            writes[directory / f"{name}.csv"] = _csv(*table)

        tasks = [self._write_text(path, text) for path, text in writes.items()]
        paths = list(writes)
        for name, field in result.fields.items():
            dump = FieldFile(field, f"{name}.field", self.field_format)
            tasks.append(self._write_bytes(directory / dump.filename, dump.encode()))
            paths.append(directory / dump.filename)

        await gather(*tasks)
        logger.info("wrote %d artifacts to %s", len(paths), directory)
        return paths

    async def start(
        self, config: ExperimentConfig, executor: Optional[Executor] = None, output: Optional[Path] = None
    ) -> ExperimentResult:
        result = await self._loop.run_in_executor(executor, run_experiment, config)
        await self.write(result, output or config.output_dir())
        return result

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        """Make a blocking call to run one experiment and write its artifacts."""

        return self._loop.run_until_complete(self.start(config))

    async def _start_many(self, configs: Sequence[ExperimentConfig], concurrency: int) -> List[ExperimentResult]:
        lock = Semaphore(concurrency)
        directories = [config.output_dir() for config in configs]
        if len(set(directories)) < len(directories):
            # Runs sharing a directory get numbered subdirectories.
            directories = [directory / f"{index:03d}" for index, directory in enumerate(directories)]

        with ProcessPoolExecutor(max_workers=concurrency) as executor:

            async def guarded(config: ExperimentConfig, directory: Path) -> ExperimentResult:
                async with lock:
                    return await self.start(config, executor, directory)

            return list(await gather(*(guarded(config, directory) for config, directory in zip(configs, directories))))

    def run_many(self, configs: Sequence[ExperimentConfig], concurrency: int = 2) -> List[ExperimentResult]:
        """Run several experiments in worker processes, at most ``concurrency`` at a time.

        :param configs: The experiments to run.
        :type configs: Sequence[ExperimentConfig]
        :param concurrency: The number of experiments in flight.
        :type concurrency: int
        """

        if concurrency < 1:
            raise ArgumentError(f"concurrency must be at least 1, got {concurrency}")
        return self._loop.run_until_complete(self._start_many(configs, concurrency))

    def close(self) -> None:
        self._loop.close()
